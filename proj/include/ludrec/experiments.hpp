#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ludrec/solvers.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec {

enum class SweepAxis { kCorruptionFraction, kNoiseSigma };

std::string_view ToString(SweepAxis axis);
/// "corruption" or "noise".
SweepAxis ParseSweepAxis(std::string_view text);

struct SweepSpec {
  std::size_t n = 50;
  double p = 0.5;
  SweepAxis axis = SweepAxis::kCorruptionFraction;
  std::vector<double> grid;
  std::size_t seeds = 10;
  std::vector<Method> methods = {Method::kLud};
  SolverParams solver_params;
  std::uint64_t master_seed = 0;

  void Validate() const;
};

enum class TrialStatus { kConverged, kMaxIters, kSkipped };

std::string_view ToString(TrialStatus status);

struct TrialRecord {
  Method method = Method::kLud;
  SweepAxis axis = SweepAxis::kCorruptionFraction;
  double axis_value = 0.0;
  std::size_t axis_index = 0;
  std::size_t seed_index = 0;
  /// NaN for skipped trials.
  double nrmse = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  TrialStatus status = TrialStatus::kConverged;
  std::uint64_t wall_time_ms = 0;
};

/// master_seed XOR SplitMix64(SplitMix64(axis_index) + seed_index).
std::uint64_t TrialSeed(std::uint64_t master_seed, std::size_t axis_index, std::size_t seed_index);

/// The instance a trial solves: EdgeFraction corruption with sigma = 0 on the
/// corruption axis, clean edges with noise on the noise axis.
Instance TrialInstance(const SweepSpec& spec, std::size_t axis_index, std::size_t seed_index);

struct TrialArtifacts {
  Instance instance;
  /// Parallel to the returned records; empty for skipped trials.
  std::vector<SolverResult> results;
};

/// One record per requested method. A disconnected graph produces Skipped
/// records instead of an error.
std::vector<TrialRecord> RunTrial(const SweepSpec& spec, std::size_t axis_index,
                                  std::size_t seed_index, TrialArtifacts* artifacts = nullptr);

/// Every grid point x seed x method, ordered by (axis value, seed, method)
/// whatever the worker count. jobs = 0 selects the hardware concurrency.
std::vector<TrialRecord> RunSweep(const SweepSpec& spec, std::size_t jobs = 0);

struct SummaryRow {
  Method method = Method::kLud;
  double axis_value = 0.0;
  double nrmse_median = 0.0;
  double nrmse_mean = 0.0;
  double nrmse_min = 0.0;
  double nrmse_max = 0.0;
  double converged_frac = 0.0;
};

/// One row per (axis value, method). Skipped trials count against the
/// convergence fraction but not in the NRMSE statistics. Throws
/// kPrecondition on empty input.
std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& records);

/// Median with the midpoint convention for even counts.
double Median(std::vector<double> values);

void WriteTrialsCsv(std::ostream& out, const std::vector<TrialRecord>& records);
void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct SweepConfig {
  SweepSpec spec;
  std::string prefix = "sweep";
};

/// key=value lines; '#' starts a comment. Required keys: n, p, axis, grid.
/// Optional: seeds, methods, master_seed, max_iters, tol, rho, prefix.
/// Throws kParse naming the offending key.
SweepConfig ParseSweepConfig(std::istream& in);

}  // namespace ludrec
