#include "ludrec/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "ludrec/error.hpp"

namespace ludrec {

std::string_view ToString(Method method) {
  return method == Method::kLud ? "lud" : "shapefit";
}

std::string_view ToString(SolverStatus status) {
  return status == SolverStatus::kConverged ? "Converged" : "MaxIters";
}

Method ParseMethod(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lud") return Method::kLud;
  if (lower == "shapefit") return Method::kShapeFit;
  throw Error(ErrorKind::kParse, "unknown method '" + std::string(text) + "'");
}

SolverStatus ParseStatus(std::string_view text) {
  if (text == "Converged") return SolverStatus::kConverged;
  if (text == "MaxIters") return SolverStatus::kMaxIters;
  throw Error(ErrorKind::kParse, "unknown solver status '" + std::string(text) + "'");
}

void SolverParams::Validate() const {
  if (max_iters < 1) throw Error(ErrorKind::kPrecondition, "max_iters must be >= 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) {
    throw Error(ErrorKind::kPrecondition, "tolerances must be positive");
  }
  if (!(rho > 0.0)) throw Error(ErrorKind::kPrecondition, "rho must be positive");
}

double OptimalAlpha(const UnitVector3& gamma, const Point3& d) {
  return std::max(1.0, gamma.vec().dot(d));
}

double Fij(const UnitVector3& gamma, const Point3& d) {
  const Point3& g = gamma.vec();
  const double along = g.dot(d);
  if (along > 1.0) return (d - along * g).norm();
  return (d - g).norm();
}

double LudObjective(const ViewGraph& graph, const LocationSet& locs) {
  double sum = 0.0;
  for (const auto& e : graph.edges()) sum += Fij(e.direction, locs[e.i] - locs[e.j]);
  return sum;
}

double ShapeFitObjective(const ViewGraph& graph, const LocationSet& locs) {
  double sum = 0.0;
  for (const auto& e : graph.edges()) {
    sum += ProjectPerp(e.direction, locs[e.i] - locs[e.j]).norm();
  }
  return sum;
}

double Objective(Method method, const ViewGraph& graph, const LocationSet& locs) {
  return method == Method::kLud ? LudObjective(graph, locs) : ShapeFitObjective(graph, locs);
}

namespace {

using Coords = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

void RequireSolvable(const ViewGraph& graph) {
  if (graph.num_vertices() < 2) {
    throw Error(ErrorKind::kPrecondition, "solver needs at least two vertices");
  }
  if (graph.num_edges() == 0 || !graph.IsConnected()) {
    throw Error(ErrorKind::kDisconnectedGraph,
                "measurement graph is disconnected; solve each component separately");
  }
}

// Edge-wise view of the graph in flat arrays.
struct EdgeArrays {
  std::vector<Eigen::Index> from;
  std::vector<Eigen::Index> to;
  Coords gamma;

  explicit EdgeArrays(const ViewGraph& graph)
      : from(graph.num_edges()), to(graph.num_edges()), gamma(graph.num_edges(), 3) {
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
      const Edge& edge = graph.edge(e);
      from[e] = static_cast<Eigen::Index>(edge.i);
      to[e] = static_cast<Eigen::Index>(edge.j);
      gamma.row(static_cast<Eigen::Index>(e)) = edge.direction.vec().transpose();
    }
  }

  Eigen::Index size() const { return gamma.rows(); }

  // out_e = t_i - t_j
  void Differences(const Coords& t, Coords& out) const {
    for (Eigen::Index e = 0; e < size(); ++e) out.row(e) = t.row(from[e]) - t.row(to[e]);
  }

  // out = B^T c: out_i = sum_{e=(i,.)} c_e - sum_{e=(.,i)} c_e
  void Scatter(const Coords& c, Coords& out) const {
    out.setZero();
    for (Eigen::Index e = 0; e < size(); ++e) {
      out.row(from[e]) += c.row(e);
      out.row(to[e]) -= c.row(e);
    }
  }
};

void SubtractMean(Coords& t) {
  const Eigen::RowVector3d mean = t.colwise().mean();
  t.rowwise() -= mean;
}

LocationSet ToLocations(const Coords& t) {
  std::vector<Point3> pts(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) pts[static_cast<std::size_t>(i)] = t.row(i).transpose();
  return LocationSet(std::move(pts));
}

// Block soft threshold: the proximal map of kappa |.| applied row-wise.
void ShrinkRows(Coords& y, double kappa) {
  for (Eigen::Index e = 0; e < y.rows(); ++e) {
    const double norm = y.row(e).norm();
    const double scale = norm > kappa ? 1.0 - kappa / norm : 0.0;
    y.row(e) *= scale;
  }
}

// Residual balancing; returns the factor applied to rho.
double BalanceRho(double primal, double dual, double& rho) {
  constexpr double kMu = 10.0;
  constexpr double kTau = 2.0;
  if (primal > kMu * dual) {
    rho *= kTau;
    return kTau;
  }
  if (dual > kMu * primal) {
    rho /= kTau;
    return 1.0 / kTau;
  }
  return 1.0;
}

}  // namespace

// ADMM on  min sum |z_e|  s.t.  z_e + alpha_e gamma_e = t_i - t_j, alpha_e >= 1.
// The t-block is a Laplacian solve; the (z, alpha) block is exact in closed
// form: alpha = max(1, <v, gamma>) followed by a soft threshold of
// v - alpha gamma, because the Moreau envelope of |.| is increasing in the
// norm of its argument.
SolverResult SolveLud(const ViewGraph& graph, const SolverParams& params) {
  params.Validate();
  RequireSolvable(graph);
  const auto n = static_cast<Eigen::Index>(graph.num_vertices());
  const EdgeArrays edges(graph);
  const Eigen::Index m = edges.size();

  // L + 11^T / n is positive definite for a connected graph, and B^T c always
  // has zero column sums, so the solve lands in {sum t = 0}.
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  for (Eigen::Index e = 0; e < m; ++e) {
    const Eigen::Index i = edges.from[e];
    const Eigen::Index j = edges.to[e];
    laplacian(i, i) += 1.0;
    laplacian(j, j) += 1.0;
    laplacian(i, j) -= 1.0;
    laplacian(j, i) -= 1.0;
  }
  const Eigen::LLT<Eigen::MatrixXd> factor(laplacian);

  Coords t = Coords::Zero(n, 3);
  Coords w = edges.gamma;  // z + alpha gamma, starts at alpha = 1, z = 0
  Coords u = Coords::Zero(m, 3);
  Coords c(m, 3), d(m, 3), w_new(m, 3), rhs(n, 3), dual_vec(n, 3);
  double rho = params.rho;
  const double primal_scale = std::sqrt(3.0 * static_cast<double>(m));
  const double dual_scale = std::sqrt(3.0 * static_cast<double>(n));

  SolverResult result;
  result.residual_history.reserve(std::min<std::size_t>(params.max_iters, 1 << 16));
  for (std::size_t it = 0; it < params.max_iters; ++it) {
    c = w - u;
    edges.Scatter(c, rhs);
    t = factor.solve(rhs);
    SubtractMean(t);

    edges.Differences(t, d);
    w_new = d + u;  // v
    for (Eigen::Index e = 0; e < m; ++e) {
      const double alpha = std::max(1.0, w_new.row(e).dot(edges.gamma.row(e)));
      Eigen::RowVector3d y = w_new.row(e) - alpha * edges.gamma.row(e);
      const double norm = y.norm();
      const double kappa = 1.0 / rho;
      y *= norm > kappa ? 1.0 - kappa / norm : 0.0;
      w_new.row(e) = y + alpha * edges.gamma.row(e);
    }

    const Coords r = d - w_new;
    u += r;
    edges.Scatter(w_new - w, dual_vec);
    w = w_new;

    const double primal = r.norm() / primal_scale;
    const double dual = rho * dual_vec.norm() / dual_scale;
    result.residual_history.push_back({primal, dual});
    result.iterations = it + 1;
    if (primal < params.primal_tol && dual < params.dual_tol) {
      result.status = SolverStatus::kConverged;
      break;
    }
    if (params.rescale_interval > 0 && (it + 1) % params.rescale_interval == 0) {
      u /= BalanceRho(primal, dual, rho);
    }
  }

  result.locations = ToLocations(t);
  result.alphas.resize(static_cast<std::size_t>(m));
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    result.alphas[e] =
        OptimalAlpha(edge.direction, result.locations[edge.i] - result.locations[edge.j]);
  }
  result.objective = LudObjective(graph, result.locations);
  return result;
}

// ADMM on  min sum |z_e|  s.t.  z_e = P_e (t_i - t_j),  C t = (m, 0, 0, 0).
// The problem is solved with the scale constraint multiplied by |E| so that
// edge lengths are O(1) and the absolute tolerances act relatively; the
// result is divided by |E| at the end. The t-block is an equality-constrained
// least squares problem whose KKT matrix is inverted once (pseudo-inverse,
// since non-rigid inputs make it singular).
SolverResult SolveShapeFit(const ViewGraph& graph, const SolverParams& params) {
  params.Validate();
  RequireSolvable(graph);
  const auto n = static_cast<Eigen::Index>(graph.num_vertices());
  const EdgeArrays edges(graph);
  const Eigen::Index m = edges.size();
  const Eigen::Index dim = 3 * n;

  std::vector<Eigen::Matrix3d> proj(static_cast<std::size_t>(m));
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim + 4, dim + 4);
  Coords scale_row = Coords::Zero(n, 3);
  for (Eigen::Index e = 0; e < m; ++e) {
    const Eigen::Vector3d g = edges.gamma.row(e).transpose();
    const Eigen::Matrix3d p = Eigen::Matrix3d::Identity() - g * g.transpose();
    proj[static_cast<std::size_t>(e)] = p;
    const Eigen::Index i = 3 * edges.from[e];
    const Eigen::Index j = 3 * edges.to[e];
    kkt.block<3, 3>(i, i) += p;
    kkt.block<3, 3>(j, j) += p;
    kkt.block<3, 3>(i, j) -= p;
    kkt.block<3, 3>(j, i) -= p;
    scale_row.row(edges.from[e]) += g.transpose();
    scale_row.row(edges.to[e]) -= g.transpose();
  }
  const Eigen::Map<const Eigen::RowVectorXd> scale_flat(scale_row.data(), dim);
  kkt.block(dim, 0, 1, dim) = scale_flat;
  kkt.block(0, dim, dim, 1) = scale_flat.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      kkt(dim + 1 + k, 3 * i + k) = 1.0;
      kkt(3 * i + k, dim + 1 + k) = 1.0;
    }
  }
  const Eigen::MatrixXd kkt_inv = kkt.completeOrthogonalDecomposition().pseudoInverse();
  // Only the t rows of the inverse are needed.
  const Eigen::MatrixXd solve_rows = kkt_inv.topRows(dim);
  const double target = static_cast<double>(m);

  Coords t = Coords::Zero(n, 3);
  Coords z = Coords::Zero(m, 3);
  Coords u = Coords::Zero(m, 3);
  Coords c(m, 3), pd(m, 3), z_new(m, 3), rhs(n, 3), dual_vec(n, 3), dz(m, 3);
  Eigen::VectorXd rhs_full(dim + 4);
  double rho = params.rho;
  const double primal_scale = std::sqrt(3.0 * static_cast<double>(m));
  const double dual_scale = std::sqrt(3.0 * static_cast<double>(n));

  auto project_rows = [&](const Coords& in, Coords& out) {
    for (Eigen::Index e = 0; e < m; ++e) {
      out.row(e) = (proj[static_cast<std::size_t>(e)] * in.row(e).transpose()).transpose();
    }
  };

  SolverResult result;
  for (std::size_t it = 0; it < params.max_iters; ++it) {
    project_rows(z - u, c);
    edges.Scatter(c, rhs);
    rhs_full.head(dim) = Eigen::Map<const Eigen::VectorXd>(rhs.data(), dim);
    rhs_full.tail(4) << target, 0.0, 0.0, 0.0;
    const Eigen::VectorXd t_flat = solve_rows * rhs_full;
    t = Eigen::Map<const Coords>(t_flat.data(), n, 3);
    SubtractMean(t);

    edges.Differences(t, c);
    project_rows(c, pd);
    z_new = pd + u;
    ShrinkRows(z_new, 1.0 / rho);

    const Coords r = pd - z_new;
    u += r;
    project_rows(z_new - z, dz);
    edges.Scatter(dz, dual_vec);
    z = z_new;

    const double primal = r.norm() / primal_scale;
    const double dual = rho * dual_vec.norm() / dual_scale;
    result.residual_history.push_back({primal, dual});
    result.iterations = it + 1;
    if (primal < params.primal_tol && dual < params.dual_tol) {
      result.status = SolverStatus::kConverged;
      break;
    }
    if (params.rescale_interval > 0 && (it + 1) % params.rescale_interval == 0) {
      u /= BalanceRho(primal, dual, rho);
    }
  }

  t /= target;
  result.locations = ToLocations(t);
  result.objective = ShapeFitObjective(graph, result.locations);
  return result;
}

SolverResult Solve(Method method, const ViewGraph& graph, const SolverParams& params) {
  return method == Method::kLud ? SolveLud(graph, params) : SolveShapeFit(graph, params);
}

}  // namespace ludrec
