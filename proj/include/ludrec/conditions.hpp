#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ludrec/geometry.hpp"
#include "ludrec/rng.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec {

enum class Verdict { kPass, kFail, kUndetermined };

std::string_view ToString(Verdict verdict);

struct ConditionReport {
  std::string name;
  Verdict verdict = Verdict::kUndetermined;
  /// Overrides the printed verdict word ("rigid", "self-consistent", ...).
  std::string label;
  /// Measured constants in insertion order; the first one is the headline
  /// value used for the CSV row.
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::string> details;
  std::vector<ConditionReport> children;

  void Add(std::string key, double value) { constants.emplace_back(std::move(key), value); }
  void Note(std::string text) { details.push_back(std::move(text)); }
  std::optional<double> Constant(std::string_view key) const;
  const ConditionReport* Child(std::string_view child_name) const;
  /// Fail if any child failed, else Undetermined if any child is, else Pass.
  static Verdict Combine(std::span<const ConditionReport> parts);
};

/// Indented "key: value" text, children nested under their parent.
void WriteReportText(std::ostream& out, const ConditionReport& report);
void WriteReportCsvHeader(std::ostream& out);
/// One row per report node: condition,verdict,constant_name,constant_value,seed.
void WriteReportCsv(std::ostream& out, const ConditionReport& report, std::uint64_t seed);
/// True if the report or any descendant is a Fail.
bool AnyFail(const ConditionReport& report);

/// |{k : ik in E and jk in E}|.
std::size_t Codegree(const ViewGraph& graph, std::size_t i, std::size_t j);

/// Connectivity, degrees in [np/2, 2np] and codegrees in [np^2/2, 2np^2].
ConditionReport CheckPTypical(const ViewGraph& graph, double p);

struct WellDistributedEstimate {
  /// Minimum of the averaged projection ratio over the directions examined.
  double value = 0.0;
  /// Direction attaining it (unit, orthogonal to x - y).
  Point3 h = Point3::Zero();
  /// Some t in A is collinear with x and y.
  bool degenerate = false;
};

/// Estimates the largest c for which A is c-well-distributed with respect to
/// (x, y). Every term depends on h only through its component orthogonal to
/// x - y, so the search runs on that unit circle: `samples` random sphere
/// directions are screened first, then every breakpoint of the piecewise
/// concave ratio is evaluated, which makes the returned minimum exact up to
/// rounding.
WellDistributedEstimate WellDistributedConstant(std::span<const Point3> A, const Point3& x,
                                                const Point3& y, std::size_t samples, Rng& rng);

/// Smallest well-distributed constant over all vertex pairs, with A the
/// common neighbours of the pair in `graph`. Pairs without common neighbours
/// yield 0.
struct WellDistributedSummary {
  double min_value = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  std::size_t empty_pairs = 0;
  std::size_t degenerate_pairs = 0;
};
WellDistributedSummary WellDistributedAlong(const ViewGraph& graph, const LocationSet& locs,
                                            std::size_t samples, Rng& rng);

/// Mean distance over all C(n, 2) pairs.
double MeanPairwiseDistance(const LocationSet& locs);

struct GoodShapeParams {
  double p = 0.5;
  double beta = 0.0;
  double epsilon_0 = 0.0;
  double epsilon_1 = 0.0;
  double c_0 = 1.0;
  double c_1 = 0.0;

  /// beta = p / (2^18 log n), c_0 = 64 sqrt(log n), epsilon_1 = p / (192 c_0),
  /// c_1 = c / sqrt(log n) and epsilon_0 set to the largest value the
  /// parameter inequality admits.
  static GoodShapeParams ForHlv(std::size_t n, double p, double c = kDefaultWellDistributedScale);

  /// Right-hand sides of the parameter inequality.
  double Epsilon0Bound() const;
  double Epsilon1Bound() const;

  void Validate() const;

  static constexpr double kDefaultWellDistributedScale = 0.1;
};

struct GoodShapeOptions {
  /// Random directions screened per pair before breakpoint refinement.
  std::size_t well_distributed_samples = 16;
};

/// Evaluates the six good-shape properties and the parameter inequality.
/// Property 2 is read as "at most epsilon_1 n indices k fail the angle
/// bounds"; property 4 compares the measured epsilon_0 with params.
ConditionReport CheckGoodShape(const Instance& instance, double c_star,
                               const GoodShapeParams& params, Rng& rng,
                               const GoodShapeOptions& options = {});

/// Triangle area below 1e-10 times the squared longest side.
bool Collinear(const Point3& a, const Point3& b, const Point3& c);

struct MotionDecomposition {
  /// Pairs (i, j), i < j, of K_n in lexicographic order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// |P_{gamma*_ij perp}(eps_i - eps_j)|.
  std::vector<double> eta;
  /// <eps_i - eps_j, gamma*_ij> / |t*_i - t*_j|.
  std::vector<double> delta;
};

MotionDecomposition DecomposeMotion(const LocationSet& gt, std::span<const Point3> eps);

/// Removes the components along translations and along the (centered)
/// ground truth, so that sum eps_i = 0 and sum <eps_i, t*_i> = 0.
std::vector<Point3> ProjectPerturbation(const LocationSet& gt, std::span<const Point3> eps);

struct DominanceOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

/// Falsification by sampling: random perturbations are projected and the
/// dominance inequality is tested on each. Fail when a violating
/// perturbation is found, Pass when the right-hand side is empty, otherwise
/// Undetermined. The factor-2 sufficient inequality is tested alongside.
ConditionReport CheckDominance(const Instance& instance, double c_star,
                               const DominanceOptions& options = {});

}  // namespace ludrec
