#include "ludrec/oracle_scale.hpp"

#include <algorithm>
#include <cmath>

#include "ludrec/error.hpp"
#include "ludrec/solvers.hpp"

namespace ludrec {

namespace {

const LocationSet& RequireGroundTruth(const Instance& instance) {
  if (!instance.ground_truth) {
    throw Error(ErrorKind::kPrecondition, "oracle scale needs ground-truth locations");
  }
  if (instance.ground_truth->size() != instance.graph.num_vertices()) {
    throw Error(ErrorKind::kPrecondition, "ground truth size does not match the graph");
  }
  return *instance.ground_truth;
}

// One-sided derivative of c -> f(gamma, c v). `right` selects the side.
double EdgeSlope(const Edge& e, const Point3& v, double c, bool right) {
  const double norm_v = v.norm();
  if (e.good()) {
    // max(0, 1 - c |v|)
    const double knee = 1.0 / norm_v;
    const bool active = right ? c < knee : c <= knee;
    return active ? -norm_v : 0.0;
  }
  const Point3& g = e.direction.vec();
  const double s = g.dot(v);
  const double along = c * s;
  const bool on_ray_side = along > 1.0 || (along == 1.0 && (right ? s > 0.0 : s < 0.0));
  if (on_ray_side) {
    const double perp = (v - s * g).norm();
    return c > 0.0 ? perp : -perp;
  }
  const Point3 r = c * v - g;
  const double nr = r.norm();
  if (nr == 0.0) return right ? norm_v : -norm_v;
  return v.dot(r) / nr;
}

struct Slopes {
  const Instance& instance;
  const LocationSet& gt;

  double operator()(double c, bool right) const {
    double sum = 0.0;
    for (const auto& e : instance.graph.edges()) {
      sum += EdgeSlope(e, gt[e.i] - gt[e.j], c, right);
    }
    return sum;
  }
};

// Smallest c with pred(c) true, for a predicate monotone in c, given
// pred(a) false and pred(b) true.
template <typename Pred>
double Bisect(double a, double b, const Pred& pred) {
  for (int k = 0; k < 400; ++k) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    (pred(mid) ? b : a) = mid;
  }
  return b;
}

}  // namespace

double OracleObjective(const Instance& instance, double c) {
  const LocationSet& gt = RequireGroundTruth(instance);
  double sum = 0.0;
  for (const auto& e : instance.graph.edges()) {
    sum += Fij(e.direction, c * (gt[e.i] - gt[e.j]));
  }
  return sum;
}

OracleScaleResult OracleScale(const Instance& instance) {
  if (instance.graph.num_edges() == 0) {
    throw Error(ErrorKind::kEmptyEdgeSet, "oracle scale needs at least one edge");
  }
  const LocationSet& gt = RequireGroundTruth(instance);
  for (const auto& e : instance.graph.edges()) {
    if ((gt[e.i] - gt[e.j]).norm() < kCoincidentTolerance) {
      throw Error(ErrorKind::kCoincidentPoints, "edge joins coincident ground-truth points");
    }
  }
  const Slopes slope{instance, gt};
  const auto right_nonneg = [&](double c) { return slope(c, true) >= 0.0; };
  const auto left_pos = [&](double c) { return slope(c, false) > 0.0; };

  // The slope tends to a negative limit as c -> -inf, so a left bracket
  // always exists.
  double a = -1.0;
  while (right_nonneg(a)) {
    a *= 2.0;
    if (a < -kOracleScanBound) {
      throw Error(ErrorKind::kDegenerateScale, "oracle objective has no finite minimizer");
    }
  }

  OracleScaleResult result;
  double b = 1.0;
  while (!right_nonneg(b) && b < kOracleScanBound) b = std::min(2.0 * b, kOracleScanBound);
  if (!right_nonneg(b)) {
    result.lo = result.hi = kOracleScanBound;
    result.truncated = true;
  } else {
    result.lo = Bisect(a, b, right_nonneg);
    double d = std::max(result.lo, 1.0);
    while (!left_pos(d) && d < kOracleScanBound) d = std::min(2.0 * d, kOracleScanBound);
    if (!left_pos(d)) {
      result.hi = kOracleScanBound;
      result.truncated = true;
    } else {
      result.hi = Bisect(a, d, left_pos);
      // Bisection returns the first point with a positive left slope; the
      // minimizer set ends there.
      result.hi = std::max(result.hi, result.lo);
    }
  }
  result.c_star = 0.5 * (result.lo + result.hi);
  result.unique = !result.truncated && result.hi - result.lo < kOracleUniqueWidth;
  if (!(result.c_star > 0.0)) {
    throw Error(ErrorKind::kDegenerateScale, "oracle scale minimizer is not positive");
  }
  result.objective_at_c = OracleObjective(instance, result.c_star);
  return result;
}

EdgePartition GoodLongPartition(const Instance& instance, double c_star) {
  if (!(c_star > 0.0)) throw Error(ErrorKind::kPrecondition, "c_star must be positive");
  const LocationSet& gt = RequireGroundTruth(instance);
  const ViewGraph& graph = instance.graph;
  EdgePartition part;
  std::vector<std::size_t> degree(graph.num_vertices(), 0);
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edge(k);
    if (e.good() && (gt[e.i] - gt[e.j]).norm() > 1.0 / c_star) {
      part.good_long.push_back(k);
    } else {
      part.complement.push_back(k);
      ++degree[e.i];
      ++degree[e.j];
    }
  }
  const std::size_t max_degree =
      degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  part.epsilon_0 = static_cast<double>(max_degree) / static_cast<double>(graph.num_vertices());
  return part;
}

}  // namespace ludrec
