#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ludrec/error.hpp"
#include "ludrec/solvers.hpp"

namespace ludrec {

namespace {

constexpr std::size_t kEpochs = 25;
constexpr double kInitialStep = 1.0;

using Coords = std::vector<Point3>;

double Evaluate(const ViewGraph& graph, const Coords& t, Method method) {
  double sum = 0.0;
  for (const auto& e : graph.edges()) {
    const Point3 d = t[e.i] - t[e.j];
    sum += method == Method::kLud ? Fij(e.direction, d) : ProjectPerp(e.direction, d).norm();
  }
  return sum;
}

}  // namespace

// Normalized projected subgradient with geometric step halving; every epoch
// restarts from the best iterate seen so far. ShapeFit runs with the scale
// constraint multiplied by |E| and is rescaled on return.
SolverResult SolveReference(const ViewGraph& graph, Method method, std::size_t iters) {
  const std::size_t n = graph.num_vertices();
  if (n > kReferenceMaxVertices) {
    throw Error(ErrorKind::kSizeLimit,
                "reference solver is limited to " + std::to_string(kReferenceMaxVertices) +
                    " vertices");
  }
  if (n < 2 || graph.num_edges() == 0) {
    throw Error(ErrorKind::kEmptyEdgeSet, "reference solver needs at least one edge");
  }
  if (!graph.IsConnected()) throw Error(ErrorKind::kDisconnectedGraph, "graph is disconnected");
  if (iters == 0) throw Error(ErrorKind::kPrecondition, "iters must be >= 1");

  const double m = static_cast<double>(graph.num_edges());
  // a = gradient of the ShapeFit scale constraint.
  Coords a(n, Point3::Zero());
  for (const auto& e : graph.edges()) {
    a[e.i] += e.direction.vec();
    a[e.j] -= e.direction.vec();
  }
  double a_norm2 = 0.0;
  for (const auto& v : a) a_norm2 += v.squaredNorm();
  if (method == Method::kShapeFit && a_norm2 == 0.0) {
    throw Error(ErrorKind::kPrecondition, "scale constraint is degenerate");
  }

  Coords t(n, Point3::Zero());
  if (method == Method::kShapeFit) {
    for (std::size_t i = 0; i < n; ++i) t[i] = a[i] * (m / a_norm2);
  }
  Coords best_t = t;
  double best = Evaluate(graph, t, method);

  const std::size_t epoch_len = std::max<std::size_t>(1, iters / kEpochs);
  double step = kInitialStep;
  Coords grad(n);
  std::size_t k = 0;
  for (; k < iters; ++k) {
    if (k > 0 && k % epoch_len == 0) {
      step *= 0.5;
      t = best_t;
    }
    std::fill(grad.begin(), grad.end(), Point3::Zero());
    for (const auto& e : graph.edges()) {
      const Point3& g = e.direction.vec();
      const Point3 d = t[e.i] - t[e.j];
      const double along = g.dot(d);
      const Point3 r = (method == Method::kLud && along <= 1.0) ? Point3(d - g)
                                                                 : Point3(d - along * g);
      const double nr = r.norm();
      if (nr > 1e-300) {
        grad[e.i] += r / nr;
        grad[e.j] -= r / nr;
      }
    }
    Point3 mean = Point3::Zero();
    for (const auto& v : grad) mean += v;
    mean /= static_cast<double>(n);
    for (auto& v : grad) v -= mean;
    if (method == Method::kShapeFit) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += grad[i].dot(a[i]);
      for (std::size_t i = 0; i < n; ++i) grad[i] -= (dot / a_norm2) * a[i];
    }
    double gnorm2 = 0.0;
    for (const auto& v : grad) gnorm2 += v.squaredNorm();
    if (gnorm2 == 0.0) break;
    const double scale = step / std::sqrt(gnorm2);
    for (std::size_t i = 0; i < n; ++i) t[i] -= scale * grad[i];
    const double f = Evaluate(graph, t, method);
    if (f < best) {
      best = f;
      best_t = t;
    }
  }

  if (method == Method::kShapeFit) {
    for (auto& v : best_t) v /= m;
  }
  SolverResult result;
  result.locations = LocationSet(std::move(best_t));
  result.objective = Objective(method, graph, result.locations);
  if (method == Method::kLud) {
    for (const auto& e : graph.edges()) {
      result.alphas.push_back(
          OptimalAlpha(e.direction, result.locations[e.i] - result.locations[e.j]));
    }
  }
  result.iterations = k;
  result.status = k < iters ? SolverStatus::kConverged : SolverStatus::kMaxIters;
  return result;
}

}  // namespace ludrec
