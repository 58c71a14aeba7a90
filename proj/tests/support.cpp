#include "support.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

#include "ludrec/oracle_scale.hpp"

namespace ludrec::testing {

Point3 GaussianPoint(Rng& rng) {
  std::normal_distribution<double> normal;
  return {normal(rng), normal(rng), normal(rng)};
}

LocationSet RandomLocations(std::size_t n, Rng& rng) {
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = GaussianPoint(rng);
  return LocationSet(std::move(pts));
}

std::vector<std::pair<std::size_t, std::size_t>> CompleteEdges(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return edges;
}

std::vector<std::pair<std::size_t, std::size_t>> PathEdges(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return edges;
}

ViewGraph GraphFrom(const LocationSet& locs,
                    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  ViewGraph g(locs.size());
  for (const auto& [i, j] : edges) g.AddEdge(i, j, PairwiseDirection(locs[i], locs[j]));
  return g;
}

// Direct evaluation of the objective, independent of the library's oracle.
namespace {

double RayDistance(const Point3& gamma, const Point3& d) {
  const double s = gamma.dot(d);
  if (s > 1.0) return (d - s * gamma).norm();
  return (d - gamma).norm();
}

double Objective(const Instance& inst, double c) {
  double sum = 0.0;
  for (const auto& e : inst.graph.edges()) {
    const Point3 d = c * ((*inst.ground_truth)[e.i] - (*inst.ground_truth)[e.j]);
    sum += RayDistance(e.direction.vec(), d);
  }
  return sum;
}

}  // namespace

double GridOracleScale(const Instance& instance) {
  constexpr int kPoints = 1000000;
  const double lo = std::log(1e-3), hi = std::log(1e3);
  const double step = (hi - lo) / (kPoints - 1);
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kPoints; ++k) {
    const double v = Objective(instance, std::exp(lo + step * k));
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  double a = std::exp(lo + step * std::max(best - 1, 0));
  double b = std::exp(lo + step * std::min(best + 1, kPoints - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = Objective(instance, x1), f2 = Objective(instance, x2);
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = Objective(instance, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = Objective(instance, x2);
    }
  }
  return 0.5 * (a + b);
}

double BruteForceWellDistributed(const std::vector<Point3>& A, const Point3& x, const Point3& y,
                                 std::size_t samples, Rng& rng) {
  const Point3 axis = (x - y).normalized();
  std::vector<Point3> normals;
  for (const auto& t : A) normals.push_back((t - x).cross(t - y).normalized());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const Point3 h = GaussianPoint(rng);
    const double denom = (h - h.dot(axis) * axis).norm();
    if (denom <= 1e-9) continue;
    double sum = 0.0;
    // The projection onto span{t-x, t-y}^perp has length |<h, n_t>|.
    for (const auto& nt : normals) sum += std::abs(h.dot(nt));
    best = std::min(best, sum / static_cast<double>(A.size()) / denom);
  }
  return best;
}

}  // namespace ludrec::testing
