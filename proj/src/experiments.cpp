#include "ludrec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "ludrec/error.hpp"
#include "ludrec/io.hpp"

namespace ludrec {

std::string_view ToString(SweepAxis axis) {
  return axis == SweepAxis::kCorruptionFraction ? "corruption" : "noise";
}

SweepAxis ParseSweepAxis(std::string_view text) {
  if (text == "corruption") return SweepAxis::kCorruptionFraction;
  if (text == "noise") return SweepAxis::kNoiseSigma;
  throw Error(ErrorKind::kParse, "axis must be 'corruption' or 'noise'");
}

std::string_view ToString(TrialStatus status) {
  switch (status) {
    case TrialStatus::kConverged:
      return "Converged";
    case TrialStatus::kMaxIters:
      return "MaxIters";
    case TrialStatus::kSkipped:
      return "Skipped";
  }
  return "Skipped";
}

void SweepSpec::Validate() const {
  if (n < 2) throw Error(ErrorKind::kPrecondition, "n must be at least 2");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::kPrecondition, "p must lie in (0, 1]");
  if (grid.empty()) throw Error(ErrorKind::kPrecondition, "grid must not be empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) {
      throw Error(ErrorKind::kPrecondition, "grid values must lie in [0, 1]");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorKind::kPrecondition, "grid must be strictly increasing");
    }
  }
  if (seeds == 0) throw Error(ErrorKind::kPrecondition, "seeds must be at least 1");
  if (methods.empty()) throw Error(ErrorKind::kPrecondition, "at least one method is required");
  solver_params.Validate();
}

std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t axis_index, std::size_t seed_index) {
  return master_seed ^ SplitMix64(SplitMix64(axis_index) + seed_index);
}

Instance TrialInstance(const SweepSpec& spec, std::size_t axis_index, std::size_t seed_index) {
  HlvParams params;
  params.n = spec.n;
  params.p = spec.p;
  params.seed = TrialSeed(spec.master_seed, axis_index, seed_index);
  const double value = spec.grid.at(axis_index);
  if (spec.axis == SweepAxis::kCorruptionFraction) {
    params.corruption = EdgeFraction{value};
    params.noise_sigma = 0.0;
  } else {
    params.corruption = EdgeFraction{0.0};
    params.noise_sigma = value;
  }
  return GenerateInstance(params);
}

std::vector<TrialRecord> RunTrial(const SweepSpec& spec, std::size_t axis_index,
                                  std::size_t seed_index, TrialArtifacts* artifacts) {
  Instance instance = TrialInstance(spec, axis_index, seed_index);
  std::vector<TrialRecord> records;
  std::vector<SolverResult> results;
  const bool solvable = instance.graph.num_edges() > 0 && instance.graph.IsConnected();
  for (Method method : spec.methods) {
    TrialRecord rec;
    rec.method = method;
    rec.axis = spec.axis;
    rec.axis_value = spec.grid[axis_index];
    rec.axis_index = axis_index;
    rec.seed_index = seed_index;
    if (!solvable) {
      rec.status = TrialStatus::kSkipped;
      rec.nrmse = std::numeric_limits<double>::quiet_NaN();
      rec.objective = std::numeric_limits<double>::quiet_NaN();
      records.push_back(rec);
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    SolverResult result = Solve(method, instance.graph, spec.solver_params);
    const auto stop = std::chrono::steady_clock::now();
    rec.wall_time_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count());
    rec.nrmse = Nrmse(result.locations, *instance.ground_truth).value;
    rec.objective = result.objective;
    rec.iterations = result.iterations;
    rec.status = result.status == SolverStatus::kConverged ? TrialStatus::kConverged
                                                           : TrialStatus::kMaxIters;
    records.push_back(rec);
    if (artifacts) results.push_back(std::move(result));
  }
  if (artifacts) {
    artifacts->instance = std::move(instance);
    artifacts->results = std::move(results);
  }
  return records;
}

std::vector<TrialRecord> RunSweep(const SweepSpec& spec, std::size_t jobs) {
  spec.Validate();
  const std::size_t total = spec.grid.size() * spec.seeds;
  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min(jobs, total);

  // Each job writes only its own slot, so assembly is order-independent.
  std::vector<std::vector<TrialRecord>> slots(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      try {
        slots[job] = RunTrial(spec, job / spec.seeds, job % spec.seeds);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialRecord> records;
  records.reserve(total * spec.methods.size());
  for (auto& slot : slots) {
    for (auto& rec : slot) records.push_back(rec);
  }
  return records;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kPrecondition, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::kPrecondition, "no records to summarize");
  struct Group {
    std::vector<double> nrmse;
    std::size_t total = 0;
    std::size_t converged = 0;
  };
  std::vector<Method> method_order;
  std::map<std::pair<double, std::size_t>, Group> groups;
  for (const auto& rec : records) {
    auto it = std::find(method_order.begin(), method_order.end(), rec.method);
    if (it == method_order.end()) {
      method_order.push_back(rec.method);
      it = method_order.end() - 1;
    }
    Group& g = groups[{rec.axis_value, static_cast<std::size_t>(it - method_order.begin())}];
    ++g.total;
    if (rec.status == TrialStatus::kConverged) ++g.converged;
    if (rec.status != TrialStatus::kSkipped) g.nrmse.push_back(rec.nrmse);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, g] : groups) {
    SummaryRow row;
    row.method = method_order[key.second];
    row.axis_value = key.first;
    row.converged_frac = static_cast<double>(g.converged) / static_cast<double>(g.total);
    if (g.nrmse.empty()) {
      row.nrmse_median = row.nrmse_mean = row.nrmse_min = row.nrmse_max =
          std::numeric_limits<double>::quiet_NaN();
    } else {
      row.nrmse_median = Median(g.nrmse);
      double sum = 0.0;
      for (double v : g.nrmse) sum += v;
      row.nrmse_mean = sum / static_cast<double>(g.nrmse.size());
      row.nrmse_min = *std::min_element(g.nrmse.begin(), g.nrmse.end());
      row.nrmse_max = *std::max_element(g.nrmse.begin(), g.nrmse.end());
    }
    rows.push_back(row);
  }
  return rows;
}

void WriteTrialsCsv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "method,axis,axis_value,seed,nrmse,objective,iterations,status,wall_time_ms\n";
  for (const auto& r : records) {
    out << ToString(r.method) << ',' << ToString(r.axis) << ',' << FormatReal(r.axis_value) << ','
        << r.seed_index << ',' << FormatReal(r.nrmse) << ',' << FormatReal(r.objective) << ','
        << r.iterations << ',' << ToString(r.status) << ',' << r.wall_time_ms << '\n';
  }
}

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,axis_value,nrmse_median,nrmse_mean,nrmse_min,nrmse_max,converged_frac\n";
  for (const auto& r : rows) {
    out << ToString(r.method) << ',' << FormatReal(r.axis_value) << ','
        << FormatReal(r.nrmse_median) << ',' << FormatReal(r.nrmse_mean) << ','
        << FormatReal(r.nrmse_min) << ',' << FormatReal(r.nrmse_max) << ','
        << FormatReal(r.converged_frac) << '\n';
  }
}

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadKey(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::kParse, "config key '" + key + "': " + why);
}

double ToReal(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    BadKey(key, "expected a number, got '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(v)) BadKey(key, "expected a number, got '" + value + "'");
  return v;
}

std::uint64_t ToCount(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    BadKey(key, "expected a non-negative integer, got '" + value + "'");
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    BadKey(key, "integer out of range");
  }
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(Trim(item));
  return items;
}

}  // namespace

SweepConfig ParseSweepConfig(std::istream& in) {
  SweepConfig config;
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    static const std::set<std::string> known = {"n",        "p",         "axis", "grid",
                                                "seeds",    "methods",   "master_seed",
                                                "max_iters", "tol",      "rho",  "prefix"};
    if (!known.count(key)) BadKey(key, "unknown key");
    if (values.count(key)) BadKey(key, "given twice");
    values[key] = value;
  }
  for (const char* required : {"n", "p", "axis", "grid"}) {
    if (!values.count(required)) BadKey(required, "missing required key");
  }

  SweepSpec& spec = config.spec;
  spec.n = ToCount("n", values["n"]);
  spec.p = ToReal("p", values["p"]);
  try {
    spec.axis = ParseSweepAxis(values["axis"]);
  } catch (const Error&) {
    BadKey("axis", "expected 'corruption' or 'noise'");
  }
  for (const auto& item : SplitList(values["grid"])) spec.grid.push_back(ToReal("grid", item));
  if (values.count("seeds")) spec.seeds = ToCount("seeds", values["seeds"]);
  if (values.count("methods")) {
    spec.methods.clear();
    for (const auto& item : SplitList(values["methods"])) {
      if (item == "both") {
        spec.methods.push_back(Method::kLud);
        spec.methods.push_back(Method::kShapeFit);
        continue;
      }
      try {
        spec.methods.push_back(ParseMethod(item));
      } catch (const Error&) {
        BadKey("methods", "unknown method '" + item + "'");
      }
    }
  }
  if (values.count("master_seed")) spec.master_seed = ToCount("master_seed", values["master_seed"]);
  if (values.count("max_iters")) spec.solver_params.max_iters = ToCount("max_iters", values["max_iters"]);
  if (values.count("tol")) {
    spec.solver_params.primal_tol = spec.solver_params.dual_tol = ToReal("tol", values["tol"]);
  }
  if (values.count("rho")) spec.solver_params.rho = ToReal("rho", values["rho"]);
  if (values.count("prefix")) {
    if (values["prefix"].empty()) BadKey("prefix", "must not be empty");
    config.prefix = values["prefix"];
  }

  if (spec.n < 2) BadKey("n", "must be at least 2");
  if (!(spec.p > 0.0 && spec.p <= 1.0)) BadKey("p", "must lie in (0, 1]");
  for (std::size_t k = 0; k < spec.grid.size(); ++k) {
    if (!(spec.grid[k] >= 0.0 && spec.grid[k] <= 1.0)) BadKey("grid", "values must lie in [0, 1]");
    if (k > 0 && !(spec.grid[k] > spec.grid[k - 1])) BadKey("grid", "must be strictly increasing");
  }
  if (spec.seeds == 0) BadKey("seeds", "must be at least 1");
  if (spec.methods.empty()) BadKey("methods", "at least one method is required");
  if (spec.solver_params.max_iters == 0) BadKey("max_iters", "must be at least 1");
  if (!(spec.solver_params.primal_tol > 0.0)) BadKey("tol", "must be positive");
  if (!(spec.solver_params.rho > 0.0)) BadKey("rho", "must be positive");
  spec.Validate();
  return config;
}

}  // namespace ludrec
