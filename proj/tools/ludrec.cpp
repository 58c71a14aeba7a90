// Command-line front end: gen, solve, check, rigidity, selfcheck, sweep.
//
// Exit codes: 0 success, 2 usage or parse error, 3 solver hit max_iters,
// 4 disconnected or empty graph, 5 a checked condition failed.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "ludrec/conditions.hpp"
#include "ludrec/error.hpp"
#include "ludrec/experiments.hpp"
#include "ludrec/io.hpp"
#include "ludrec/oracle_scale.hpp"
#include "ludrec/rigidity.hpp"
#include "ludrec/solvers.hpp"

namespace {

using namespace ludrec;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMaxIters = 3;
constexpr int kExitInfeasibleGraph = 4;
constexpr int kExitConditionFail = 5;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDisconnectedGraph:
    case ErrorKind::kEmptyEdgeSet:
      return kExitInfeasibleGraph;
    case ErrorKind::kDegenerateScale:
      return kExitConditionFail;
    default:
      return kExitUsage;
  }
}

struct GenArgs {
  std::size_t n = 0;
  double p = 0.0;
  std::optional<double> corrupt_frac;
  std::optional<double> corrupt_maxdeg;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveArgs {
  std::string in;
  std::string method = "lud";
  double tol = SolverParams{}.primal_tol;
  std::size_t max_iters = SolverParams{}.max_iters;
  double rho = SolverParams{}.rho;
  std::string out;
};

struct CheckArgs {
  std::string in;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  double c = GoodShapeParams::kDefaultWellDistributedScale;
  std::string csv;
};

struct SweepArgs {
  std::string config;
  std::size_t jobs = 0;
};

void WriteCsvIfRequested(const std::string& path, const ConditionReport& report,
                         std::uint64_t seed) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kPrecondition, "cannot write '" + path + "'");
  WriteReportCsvHeader(out);
  WriteReportCsv(out, report, seed);
}

int RunGen(const GenArgs& a) {
  HlvParams params;
  params.n = a.n;
  params.p = a.p;
  params.noise_sigma = a.sigma;
  params.seed = a.seed;
  if (a.corrupt_maxdeg) {
    params.corruption = MaxDegreeBound{*a.corrupt_maxdeg};
  } else {
    params.corruption = EdgeFraction{a.corrupt_frac.value_or(0.0)};
  }
  const Instance inst = GenerateInstance(params);
  WriteInstanceFile(a.out, inst);
  std::cout << "epsilon_b=" << FormatReal(EpsilonB(inst.graph)) << '\n'
            << "edges=" << inst.graph.num_edges() << '\n'
            << "bad_edges=" << inst.graph.CountBad() << '\n';
  return kExitOk;
}

int RunSolve(const SolveArgs& a) {
  SolverParams params;
  params.primal_tol = params.dual_tol = a.tol;
  params.max_iters = a.max_iters;
  params.rho = a.rho;
  params.Validate();
  std::vector<Method> methods;
  if (a.method == "both") {
    methods = {Method::kLud, Method::kShapeFit};
  } else {
    methods = {ParseMethod(a.method)};
  }
  const Instance inst = ReadInstanceFile(a.in);

  std::vector<ResultBlock> blocks;
  bool all_converged = true;
  for (Method m : methods) {
    ResultBlock block{m, Solve(m, inst.graph, params)};
    const SolverResult& r = block.result;
    if (r.status != SolverStatus::kConverged) all_converged = false;
    if (inst.ground_truth) {
      std::cout << "NRMSE=" << FormatReal(Nrmse(r.locations, *inst.ground_truth).value)
                << " method=" << ToString(m) << '\n';
    }
    std::cout << "method=" << ToString(m) << " objective=" << FormatReal(r.objective)
              << " iterations=" << r.iterations << " status=" << ToString(r.status) << '\n';
    blocks.push_back(std::move(block));
  }
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw Error(ErrorKind::kPrecondition, "cannot write '" + a.out + "'");
    WriteInstance(out, inst);
    for (const auto& b : blocks) WriteResultBlock(out, inst.graph, b);
  }
  return all_converged ? kExitOk : kExitMaxIters;
}

int RunCheck(const CheckArgs& a) {
  const Instance inst = ReadInstanceFile(a.in);
  if (!inst.ground_truth) {
    throw Error(ErrorKind::kParse, "check needs vertex (V) records in the input");
  }
  const OracleScaleResult oracle = OracleScale(inst);

  ConditionReport report;
  report.name = "conditions";
  ConditionReport scale;
  scale.name = "oracle-scale";
  scale.Add("c_star", oracle.c_star);
  scale.Add("lo", oracle.lo);
  scale.Add("hi", oracle.hi);
  scale.Add("objective", oracle.objective_at_c);
  scale.verdict = oracle.unique ? Verdict::kPass : Verdict::kUndetermined;
  if (!oracle.unique) scale.Note("minimizer is an interval; its midpoint is used");
  report.children.push_back(std::move(scale));

  Rng rng = MakeStream(a.seed, Stream::kChecks);
  const auto params = GoodShapeParams::ForHlv(inst.graph.num_vertices(), inst.params.p, a.c);
  report.children.push_back(CheckGoodShape(inst, oracle.c_star, params, rng));
  report.children.push_back(CheckDominance(inst, oracle.c_star, {a.trials, a.seed}));
  report.verdict = ConditionReport::Combine(report.children);

  WriteReportText(std::cout, report);
  WriteCsvIfRequested(a.csv, report, a.seed);
  return AnyFail(report) ? kExitConditionFail : kExitOk;
}

int RunRigidity(const std::string& in, const std::string& csv, bool measured) {
  const Instance inst = ReadInstanceFile(in);
  const bool from_locations = inst.ground_truth && !measured;
  ConditionReport report = from_locations ? ParallelRigidity(inst.graph, *inst.ground_truth)
                                          : ParallelRigidity(inst.graph);
  report.Note(from_locations ? "directions derived from the vertex records"
                             : "measured edge directions");
  if (const auto trace = HennebergCertificate(inst.graph)) {
    report.Note("gluing certificate with " + std::to_string(trace->size()) + " steps");
    for (const auto& step : *trace) report.Note(step);
  } else {
    report.Note("no gluing certificate found");
  }
  WriteReportText(std::cout, report);
  WriteCsvIfRequested(csv, report, 0);
  return report.verdict == Verdict::kFail ? kExitConditionFail : kExitOk;
}

int RunSelfcheck(const std::string& in, const std::string& csv) {
  const Instance inst = ReadInstanceFile(in);
  SelfConsistencyResult result = SelfConsistency(inst.graph);
  if (result.witness && inst.ground_truth) {
    const auto sizes = UndeformedSetSizes(*inst.ground_truth, *result.witness);
    std::size_t smallest = inst.graph.num_vertices();
    for (std::size_t s : sizes) smallest = std::min(smallest, s);
    result.report.Add("min_undeformed_set", static_cast<double>(smallest));
  }
  WriteReportText(std::cout, result.report);
  if (result.witness) {
    const auto& w = *result.witness;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::cout << "W " << i << ' ' << FormatReal(w[i].x()) << ' ' << FormatReal(w[i].y()) << ' '
                << FormatReal(w[i].z()) << '\n';
    }
  }
  WriteCsvIfRequested(csv, result.report, 0);
  return result.report.verdict == Verdict::kFail ? kExitConditionFail : kExitOk;
}

std::size_t JobsFromEnvironment(std::size_t flag_value) {
  if (const char* env = std::getenv("LUDREC_JOBS"); env && *env) {
    const std::string text(env);
    if (text.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorKind::kParse, "LUDREC_JOBS must be a non-negative integer");
    }
    return static_cast<std::size_t>(std::stoull(text));
  }
  return flag_value;
}

int RunSweepCommand(const SweepArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw Error(ErrorKind::kParse, "cannot open config '" + a.config + "'");
  const SweepConfig config = ParseSweepConfig(in);
  const std::size_t jobs = JobsFromEnvironment(a.jobs);
  const auto records = RunSweep(config.spec, jobs);
  const auto summary = Summarize(records);

  const std::string trials_path = config.prefix + "_trials.csv";
  const std::string summary_path = config.prefix + "_summary.csv";
  std::ofstream trials(trials_path, std::ios::binary);
  std::ofstream rows(summary_path, std::ios::binary);
  if (!trials || !rows) throw Error(ErrorKind::kPrecondition, "cannot write CSV output");
  WriteTrialsCsv(trials, records);
  WriteSummaryCsv(rows, summary);
  std::cout << "trials=" << records.size() << " wrote " << trials_path << ' ' << summary_path
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera location recovery by LUD and ShapeFit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an HLV instance");
  gen_cmd->add_option("--n", gen.n, "Vertex count")->required();
  gen_cmd->add_option("--p", gen.p, "Edge probability in (0, 1]")->required();
  auto* frac = gen_cmd->add_option("--corrupt-frac", gen.corrupt_frac, "Corrupt floor(q |E|) edges");
  auto* maxdeg =
      gen_cmd->add_option("--corrupt-maxdeg", gen.corrupt_maxdeg, "Bad-degree cap eps_b (fraction of n)");
  frac->excludes(maxdeg);
  gen_cmd->add_option("--sigma", gen.sigma, "Noise level in [0, 1]");
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--out", gen.out, "Output instance file")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance with LUD and/or ShapeFit");
  solve_cmd->add_option("--in", solve.in, "Instance file")->required();
  solve_cmd->add_option("--method", solve.method, "lud, shapefit or both")
      ->check(CLI::IsMember({"lud", "shapefit", "both"}));
  solve_cmd->add_option("--tol", solve.tol, "Primal and dual residual tolerance");
  solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration limit");
  solve_cmd->add_option("--rho", solve.rho, "Initial penalty parameter");
  solve_cmd->add_option("--out", solve.out, "Result file (instance plus result blocks)");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Oracle scale, good-shape and dominance checks");
  check_cmd->add_option("--in", check.in, "Instance file with ground truth")->required();
  check_cmd->add_option("--trials", check.trials, "Random perturbations for the dominance test");
  check_cmd->add_option("--seed", check.seed, "Seed for sampling-based checks");
  check_cmd->add_option("--c", check.c, "Scale c in c_1 = c / sqrt(log n)");
  check_cmd->add_option("--csv", check.csv, "Also write the report as CSV");

  std::string rig_in;
  std::string rig_csv;
  bool rig_measured = false;
  auto* rig_cmd = app.add_subcommand("rigidity", "Parallel rigidity rank test");
  rig_cmd->add_option("--in", rig_in, "Instance file")->required();
  rig_cmd->add_option("--csv", rig_csv, "Also write the report as CSV");
  rig_cmd->add_flag("--measured", rig_measured,
                    "Use the stored edge directions even when vertex records are present");

  std::string self_in;
  std::string self_csv;
  auto* self_cmd = app.add_subcommand("selfcheck", "Self-consistency of the measured directions");
  self_cmd->add_option("--in", self_in, "Instance file")->required();
  self_cmd->add_option("--csv", self_csv, "Also write the report as CSV");

  SweepArgs sweep;
  sweep.jobs = std::max(1U, std::thread::hardware_concurrency());
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a corruption or noise sweep");
  sweep_cmd->add_option("--config", sweep.config, "key=value config file")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (LUDREC_JOBS overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*solve_cmd) return RunSolve(solve);
    if (*check_cmd) return RunCheck(check);
    if (*rig_cmd) return RunRigidity(rig_in, rig_csv, rig_measured);
    if (*self_cmd) return RunSelfcheck(self_in, self_csv);
    if (*sweep_cmd) return RunSweepCommand(sweep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
