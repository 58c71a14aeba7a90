#include "ludrec/rigidity.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ludrec/error.hpp"

namespace ludrec {

namespace {

Point3 Orthogonal(const Point3& u) {
  const Point3 axis = std::abs(u.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
  return u.cross(axis).normalized();
}

void RequireEdges(const ViewGraph& graph) {
  if (graph.num_vertices() < 2) throw Error(ErrorKind::kPrecondition, "need at least two vertices");
  if (graph.num_edges() == 0) throw Error(ErrorKind::kEmptyEdgeSet, "graph has no edges");
}

ConditionReport RigidityReport(const RigidityAnalysis& a, std::size_t n) {
  ConditionReport report;
  report.name = "parallel-rigidity";
  report.Add("nullity", static_cast<double>(a.nullity));
  report.Add("rank", static_cast<double>(a.rank));
  report.Add("unknowns", static_cast<double>(3 * n));
  report.verdict = a.rigid ? Verdict::kPass : Verdict::kFail;
  report.label = a.rigid ? "rigid" : "not-rigid";
  if (a.nullity < 4) report.Note("directions are inconsistent: only translations solve the system");
  return report;
}

double Binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    r *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return r;
}

constexpr std::size_t kMaxEnumerationDim = 8;
constexpr double kMaxEnumerationSubsets = 2e6;
constexpr double kFeasibilityTol = 1e-9;

// Vertex enumeration of {L y >= 0, s y = 1}: every vertex has m - 1 active
// inequality rows.
std::optional<Eigen::VectorXd> EnumerateVertices(const Eigen::MatrixXd& L,
                                                 const Eigen::RowVectorXd& s) {
  const auto rows = static_cast<std::size_t>(L.rows());
  const auto m = static_cast<std::size_t>(L.cols());
  if (m - 1 > rows) return std::nullopt;
  std::vector<std::size_t> pick(m - 1);
  std::iota(pick.begin(), pick.end(), 0);
  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  rhs(static_cast<Eigen::Index>(m - 1)) = 1.0;
  while (true) {
    for (std::size_t r = 0; r + 1 < m; ++r) M.row(static_cast<Eigen::Index>(r)) = L.row(static_cast<Eigen::Index>(pick[r]));
    M.row(static_cast<Eigen::Index>(m - 1)) = s;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Eigen::VectorXd y = lu.solve(rhs);
      if ((L * y).minCoeff() >= -kFeasibilityTol) return y;
    }
    // Next (m-1)-subset in lexicographic order.
    if (m == 1) break;
    std::size_t k = m - 1;
    while (k > 0 && pick[k - 1] == rows - (m - 1) + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t r = k; r + 1 < m; ++r) pick[r] = pick[r - 1] + 1;
  }
  return std::nullopt;
}

// Cyclic Dykstra projections onto the half-spaces and the hyperplane.
std::optional<Eigen::VectorXd> DykstraFeasible(const Eigen::MatrixXd& L,
                                               const Eigen::RowVectorXd& s) {
  const Eigen::Index rows = L.rows();
  const Eigen::Index m = L.cols();
  Eigen::VectorXd y = s.transpose() / s.squaredNorm();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(m, rows + 1);
  for (int sweep = 0; sweep < 20000; ++sweep) {
    for (Eigen::Index r = 0; r <= rows; ++r) {
      const Eigen::VectorXd z = y + corr.col(r);
      Eigen::VectorXd proj = z;
      if (r < rows) {
        const double v = L.row(r).dot(z);
        const double nn = L.row(r).squaredNorm();
        if (v < 0.0 && nn > 0.0) proj -= (v / nn) * L.row(r).transpose();
      } else {
        proj -= ((s.dot(z) - 1.0) / s.squaredNorm()) * s.transpose();
      }
      corr.col(r) = z - proj;
      y = proj;
    }
    if ((L * y).minCoeff() >= -kFeasibilityTol && std::abs(s.dot(y) - 1.0) < 1e-9) return y;
  }
  return std::nullopt;
}

}  // namespace

RigidityAnalysis AnalyzeRigidity(const ViewGraph& graph) {
  RequireEdges(graph);
  const auto n = static_cast<Eigen::Index>(graph.num_vertices());
  const auto m = static_cast<Eigen::Index>(graph.num_edges());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * m, 3 * n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Edge& e = graph.edge(static_cast<std::size_t>(k));
    const Point3& g = e.direction.vec();
    const Point3 b1 = Orthogonal(g);
    const Point3 b2 = g.cross(b1);
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    A.block<1, 3>(2 * k, 3 * i) = b1.transpose();
    A.block<1, 3>(2 * k, 3 * j) = -b1.transpose();
    A.block<1, 3>(2 * k + 1, 3 * i) = b2.transpose();
    A.block<1, 3>(2 * k + 1, 3 * j) = -b2.transpose();
  }
  // A tall system is first reduced to its square R factor; the singular
  // values and right singular vectors are unchanged.
  Eigen::MatrixXd M;
  if (A.rows() > A.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    M = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  } else {
    M = std::move(A);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? kRankThreshold * sv(0) : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) ++rank;
  }
  RigidityAnalysis out;
  out.rank = rank;
  out.nullity = static_cast<std::size_t>(3 * n) - rank;
  out.rigid = out.nullity == 4;
  out.nullspace = svd.matrixV().rightCols(static_cast<Eigen::Index>(out.nullity));
  return out;
}

ConditionReport ParallelRigidity(const ViewGraph& graph) {
  return RigidityReport(AnalyzeRigidity(graph), graph.num_vertices());
}

ConditionReport ParallelRigidity(const ViewGraph& graph, const LocationSet& locs) {
  if (locs.size() != graph.num_vertices()) {
    throw Error(ErrorKind::kPrecondition, "location count does not match the graph");
  }
  ViewGraph derived(graph.num_vertices());
  for (const auto& e : graph.edges()) {
    derived.AddEdge(e.i, e.j, PairwiseDirection(locs[e.i], locs[e.j]), e.label);
  }
  return ParallelRigidity(derived);
}

std::optional<std::vector<std::string>> HennebergCertificate(const ViewGraph& graph) {
  const std::size_t n = graph.num_vertices();
  if (n < 2 || graph.num_edges() == 0) return std::nullopt;
  if (n == 2) return std::vector<std::string>{"edge 0 1"};
  const auto adj_list = graph.Adjacency();
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v].insert(adj_list[v].begin(), adj_list[v].end());
  const auto linked = [&](std::size_t a, std::size_t b) { return adj[a].count(b) > 0; };

  std::vector<std::size_t> hubs(n);
  std::iota(hubs.begin(), hubs.end(), 0);
  std::stable_sort(hubs.begin(), hubs.end(),
                   [&](std::size_t a, std::size_t b) { return adj[a].size() > adj[b].size(); });

  for (std::size_t hub : hubs) {
    std::optional<std::pair<std::size_t, std::size_t>> seed;
    for (std::size_t a : adj[hub]) {
      for (std::size_t b : adj[hub]) {
        if (a < b && linked(a, b)) {
          seed = {a, b};
          break;
        }
      }
      if (seed) break;
    }
    if (!seed) continue;
    std::vector<std::string> trace;
    std::vector<bool> in(n, false);
    in[hub] = in[seed->first] = in[seed->second] = true;
    std::size_t size = 3;
    trace.push_back("triangle " + std::to_string(hub) + " " + std::to_string(seed->first) + " " +
                    std::to_string(seed->second));
    bool grew = true;
    while (grew && size < n) {
      grew = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (in[v]) continue;
        std::vector<std::size_t> inside;
        for (std::size_t w : adj[v]) {
          if (in[w]) inside.push_back(w);
        }
        std::optional<std::string> step;
        for (std::size_t x = 0; x < inside.size() && !step; ++x) {
          for (std::size_t y = x + 1; y < inside.size() && !step; ++y) {
            const std::size_t a = inside[x];
            const std::size_t b = inside[y];
            if (linked(a, b)) {
              step = "triangle " + std::to_string(v) + " " + std::to_string(a) + " " +
                     std::to_string(b);
              break;
            }
            for (std::size_t c : adj[a]) {
              if (c != b && c != v && in[c] && linked(b, c)) {
                step = "quadrilateral " + std::to_string(v) + " " + std::to_string(a) + " " +
                       std::to_string(c) + " " + std::to_string(b);
                break;
              }
            }
          }
        }
        if (step) {
          in[v] = true;
          ++size;
          trace.push_back(*step);
          grew = true;
        }
      }
    }
    if (size == n) return trace;
  }
  return std::nullopt;
}

SelfConsistencyResult SelfConsistency(const ViewGraph& graph) {
  RequireEdges(graph);
  if (!graph.IsConnected()) throw Error(ErrorKind::kDisconnectedGraph, "graph is disconnected");
  const std::size_t n = graph.num_vertices();
  const auto nn = static_cast<Eigen::Index>(n);
  const RigidityAnalysis rig = AnalyzeRigidity(graph);

  // Drop the translations: project onto sum t = 0 and re-orthonormalize.
  Eigen::MatrixXd N = rig.nullspace;
  for (Eigen::Index c = 0; c < N.cols(); ++c) {
    for (int axis = 0; axis < 3; ++axis) {
      double mean = 0.0;
      for (Eigen::Index i = 0; i < nn; ++i) mean += N(3 * i + axis, c);
      mean /= static_cast<double>(n);
      for (Eigen::Index i = 0; i < nn; ++i) N(3 * i + axis, c) -= mean;
    }
  }
  Eigen::MatrixXd W(3 * nn, 0);
  if (N.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N, Eigen::ComputeThinU);
    Eigen::Index keep = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      if (svd.singularValues()(k) > 1e-8) ++keep;
    }
    W = svd.matrixU().leftCols(keep);
  }
  const Eigen::Index m = W.cols();

  SelfConsistencyResult result;
  ConditionReport& report = result.report;
  report.name = "self-consistency";
  report.Add("free_dimensions", static_cast<double>(m));
  report.Add("rigidity_nullity", static_cast<double>(rig.nullity));

  const auto finish = [&](bool feasible) {
    report.verdict = feasible ? Verdict::kPass : Verdict::kFail;
    report.label = feasible ? "self-consistent" : "not-self-consistent";
  };
  if (m == 0) {
    report.Note("only translations satisfy the direction constraints");
    finish(false);
    return result;
  }

  const auto edges = static_cast<Eigen::Index>(graph.num_edges());
  Eigen::MatrixXd L(edges, m);
  for (Eigen::Index k = 0; k < edges; ++k) {
    const Edge& e = graph.edge(static_cast<std::size_t>(k));
    const Eigen::Vector3d g = e.direction.vec();
    L.row(k) = g.transpose() * (W.middleRows<3>(3 * static_cast<Eigen::Index>(e.i)) -
                                W.middleRows<3>(3 * static_cast<Eigen::Index>(e.j)));
  }
  const Eigen::RowVectorXd s = L.colwise().sum();

  std::optional<Eigen::VectorXd> y;
  const bool enumerate = static_cast<std::size_t>(m) <= kMaxEnumerationDim &&
                         (m - 1 > edges ||
                          Binomial(static_cast<std::size_t>(edges), static_cast<std::size_t>(m - 1)) <=
                              kMaxEnumerationSubsets);
  if (enumerate) {
    report.Note("decided by vertex enumeration");
    y = EnumerateVertices(L, s);
  } else if (s.squaredNorm() > 0.0) {
    report.Note("searched with alternating projections");
    y = DykstraFeasible(L, s);
  }
  if (!y) {
    if (!enumerate) {
      report.verdict = Verdict::kUndetermined;
      report.label = "undetermined";
      report.Note("no witness found; the first-order search cannot certify infeasibility");
      return result;
    }
    finish(false);
    return result;
  }
  const Eigen::VectorXd t = W * *y;
  std::vector<Point3> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = t.segment<3>(3 * static_cast<Eigen::Index>(i));
  result.witness = LocationSet(std::move(pts));
  report.Add("min_edge_length_along_gamma", (L * *y).minCoeff());
  finish(true);
  return result;
}

std::vector<std::size_t> UndeformedSetSizes(const LocationSet& gt, const LocationSet& witness) {
  const std::size_t n = gt.size();
  if (witness.size() != n) throw Error(ErrorKind::kPrecondition, "location count mismatch");
  std::vector<std::size_t> sizes(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Point3 a = gt[i] - gt[j];
      const Point3 b = witness[i] - witness[j];
      const double scale = a.norm() * b.norm();
      if (scale == 0.0) continue;
      if (a.cross(b).norm() < 1e-10 * scale && a.dot(b) > 0.0) ++sizes[i];
    }
  }
  return sizes;
}

}  // namespace ludrec
