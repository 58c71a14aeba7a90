#include "ludrec/conditions.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "ludrec/error.hpp"
#include "ludrec/oracle_scale.hpp"

namespace ludrec {

namespace {

// Adjacency rows as bitsets so codegrees are popcounts of row intersections.
class BitAdjacency {
 public:
  explicit BitAdjacency(const ViewGraph& graph)
      : n_(graph.num_vertices()), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {
    for (const auto& e : graph.edges()) {
      Set(e.i, e.j);
      Set(e.j, e.i);
    }
  }

  std::size_t Common(std::size_t i, std::size_t j) const {
    std::size_t count = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      count += static_cast<std::size_t>(std::popcount(bits_[i * words_ + w] & bits_[j * words_ + w]));
    }
    return count;
  }

  bool Has(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }

 private:
  void Set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

std::string Pair(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

const LocationSet& RequireGroundTruth(const Instance& instance) {
  if (!instance.ground_truth) {
    throw Error(ErrorKind::kPrecondition, "condition check needs ground-truth locations");
  }
  if (instance.ground_truth->size() != instance.graph.num_vertices()) {
    throw Error(ErrorKind::kPrecondition, "ground truth size does not match the graph");
  }
  return *instance.ground_truth;
}

// Any unit vector orthogonal to u.
Point3 Orthogonal(const Point3& u) {
  const Point3 axis = std::abs(u.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
  return u.cross(axis).normalized();
}

}  // namespace

std::string_view ToString(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "Pass";
    case Verdict::kFail:
      return "Fail";
    case Verdict::kUndetermined:
      return "Undetermined";
  }
  return "Undetermined";
}

std::optional<double> ConditionReport::Constant(std::string_view key) const {
  for (const auto& [k, v] : constants) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const ConditionReport* ConditionReport::Child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

Verdict ConditionReport::Combine(std::span<const ConditionReport> parts) {
  Verdict v = Verdict::kPass;
  for (const auto& part : parts) {
    if (part.verdict == Verdict::kFail) return Verdict::kFail;
    if (part.verdict == Verdict::kUndetermined) v = Verdict::kUndetermined;
  }
  return v;
}

bool AnyFail(const ConditionReport& report) {
  if (report.verdict == Verdict::kFail) return true;
  return std::any_of(report.children.begin(), report.children.end(),
                     [](const ConditionReport& c) { return AnyFail(c); });
}

std::size_t Codegree(const ViewGraph& graph, std::size_t i, std::size_t j) {
  const std::size_t n = graph.num_vertices();
  if (i >= n || j >= n || i == j) {
    throw Error(ErrorKind::kPrecondition, "codegree needs two distinct vertices");
  }
  return BitAdjacency(graph).Common(i, j);
}

ConditionReport CheckPTypical(const ViewGraph& graph, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::kPrecondition, "p must lie in (0, 1]");
  const std::size_t n = graph.num_vertices();
  const double nd = static_cast<double>(n);
  ConditionReport report;
  report.name = "p-typical";

  const bool connected = graph.IsConnected();
  if (!connected) report.Note("graph is disconnected");

  const double deg_lo = nd * p / 2.0;
  const double deg_hi = 2.0 * nd * p;
  const auto degrees = graph.Degrees();
  std::size_t min_deg = std::numeric_limits<std::size_t>::max();
  std::size_t max_deg = 0;
  bool degrees_ok = true;
  for (std::size_t v = 0; v < n; ++v) {
    min_deg = std::min(min_deg, degrees[v]);
    max_deg = std::max(max_deg, degrees[v]);
    const double d = static_cast<double>(degrees[v]);
    if (degrees_ok && (d < deg_lo || d > deg_hi)) {
      degrees_ok = false;
      std::ostringstream msg;
      msg << "vertex " << v << " has degree " << degrees[v] << " outside [" << deg_lo << ", "
          << deg_hi << "]";
      report.Note(msg.str());
    }
  }

  const double co_lo = nd * p * p / 2.0;
  const double co_hi = 2.0 * nd * p * p;
  const BitAdjacency adj(graph);
  std::size_t min_co = std::numeric_limits<std::size_t>::max();
  std::size_t max_co = 0;
  std::size_t bad_pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t c = adj.Common(i, j);
      min_co = std::min(min_co, c);
      max_co = std::max(max_co, c);
      const double cd = static_cast<double>(c);
      if (cd < co_lo || cd > co_hi) {
        if (bad_pairs == 0) {
          std::ostringstream msg;
          msg << "pair " << Pair(i, j) << " has codegree " << c << " outside [" << co_lo << ", "
              << co_hi << "]";
          report.Note(msg.str());
        }
        ++bad_pairs;
      }
    }
  }

  report.Add("min_degree", static_cast<double>(min_deg));
  report.Add("max_degree", static_cast<double>(max_deg));
  report.Add("min_codegree", static_cast<double>(min_co));
  report.Add("max_codegree", static_cast<double>(max_co));
  report.Add("codegree_violations", static_cast<double>(bad_pairs));
  report.verdict = connected && degrees_ok && bad_pairs == 0 ? Verdict::kPass : Verdict::kFail;
  return report;
}

WellDistributedEstimate WellDistributedConstant(std::span<const Point3> A, const Point3& x,
                                                const Point3& y, std::size_t samples, Rng& rng) {
  if (A.empty()) throw Error(ErrorKind::kPrecondition, "well-distributedness needs a nonempty set");
  const Point3 axis = x - y;
  if (axis.norm() < kCoincidentTolerance) {
    throw Error(ErrorKind::kCoincidentPoints, "x and y coincide");
  }
  const Point3 u = axis.normalized();
  const Point3 e1 = Orthogonal(u);

  // Non-degenerate t contributes |<h, n_t>| with n_t the unit normal of
  // span{t - x, t - y}; a collinear t contributes |h| = 1 on the circle.
  WellDistributedEstimate est;
  std::vector<Point3> normals;
  std::size_t flat_terms = 0;
  for (const auto& t : A) {
    const Point3 a = t - x;
    const Point3 b = t - y;
    const Point3 c = a.cross(b);
    if (c.norm() <= 1e-10 * a.norm() * b.norm() || c.norm() == 0.0) {
      ++flat_terms;
      est.degenerate = true;
    } else {
      normals.push_back(c.normalized());
    }
  }
  const double inv = 1.0 / static_cast<double>(A.size());
  const auto ratio = [&](const Point3& h) {
    double sum = static_cast<double>(flat_terms);
    for (const auto& nt : normals) sum += std::abs(h.dot(nt));
    return sum * inv;
  };

  est.h = e1;
  est.value = ratio(e1);
  const auto consider = [&](const Point3& h) {
    const double r = ratio(h);
    if (r < est.value) {
      est.value = r;
      est.h = h;
    }
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const Point3 h = UniformSphere(rng).vec();
    const Point3 in_plane = h - h.dot(u) * u;
    const double norm = in_plane.norm();
    if (norm > 1e-9) consider(in_plane / norm);
  }
  // The ratio restricted to the circle is a sum of |cos| bumps, concave
  // between consecutive zeros, so its minimum sits at one of those zeros.
  for (const auto& nt : normals) {
    const Point3 h = nt.cross(u);
    const double norm = h.norm();
    if (norm > 1e-12) consider(h / norm);
  }
  return est;
}

WellDistributedSummary WellDistributedAlong(const ViewGraph& graph, const LocationSet& locs,
                                            std::size_t samples, Rng& rng) {
  const std::size_t n = graph.num_vertices();
  if (locs.size() != n) throw Error(ErrorKind::kPrecondition, "location count mismatch");
  const BitAdjacency adj(graph);
  WellDistributedSummary summary;
  summary.min_value = std::numeric_limits<double>::infinity();
  std::vector<Point3> common;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      common.clear();
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i && k != j && adj.Has(i, k) && adj.Has(j, k)) common.push_back(locs[k]);
      }
      double value = 0.0;
      if (common.empty()) {
        ++summary.empty_pairs;
      } else {
        const auto est = WellDistributedConstant(common, locs[i], locs[j], samples, rng);
        value = est.value;
        if (est.degenerate) ++summary.degenerate_pairs;
      }
      if (value < summary.min_value) {
        summary.min_value = value;
        summary.worst_i = i;
        summary.worst_j = j;
      }
    }
  }
  if (n < 2) summary.min_value = 0.0;
  return summary;
}

double MeanPairwiseDistance(const LocationSet& locs) {
  const std::size_t n = locs.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += (locs[i] - locs[j]).norm();
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

GoodShapeParams GoodShapeParams::ForHlv(std::size_t n, double p, double c) {
  if (n < 3) throw Error(ErrorKind::kPrecondition, "parameter choice needs n >= 3");
  const double log_n = std::log(static_cast<double>(n));
  GoodShapeParams params;
  params.p = p;
  params.beta = p / (std::ldexp(1.0, 18) * log_n);
  params.c_0 = 64.0 * std::sqrt(log_n);
  params.epsilon_1 = p / (192.0 * params.c_0);
  params.c_1 = std::min(1.0, c / std::sqrt(log_n));
  params.epsilon_0 = params.Epsilon0Bound();
  return params;
}

double GoodShapeParams::Epsilon0Bound() const {
  const double a = beta * c_1 * p / (std::ldexp(1.0, 22) * c_0 * c_0 * c_0);
  const double b = beta * c_1 * c_1 * p / (std::ldexp(1.0, 20) * c_0);
  const double c = c_1 * p * p / 16.0;
  return std::min({a, b, c});
}

double GoodShapeParams::Epsilon1Bound() const {
  return std::min(1.0 / (144.0 * c_0), 1.0 / 96.0);
}

void GoodShapeParams::Validate() const {
  const auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!unit(p) || !unit(beta) || !unit(epsilon_0) || !unit(epsilon_1) || !unit(c_1)) {
    throw Error(ErrorKind::kPrecondition, "p, beta, epsilon_0, epsilon_1 and c_1 must lie in (0, 1]");
  }
  if (!(c_0 >= 1.0)) throw Error(ErrorKind::kPrecondition, "c_0 must be at least 1");
}

bool Collinear(const Point3& a, const Point3& b, const Point3& c) {
  const double longest = std::max({(a - b).norm(), (b - c).norm(), (a - c).norm()});
  const double area = 0.5 * (b - a).cross(c - a).norm();
  return area < 1e-10 * longest * longest || longest == 0.0;
}

ConditionReport CheckGoodShape(const Instance& instance, double c_star,
                               const GoodShapeParams& params, Rng& rng,
                               const GoodShapeOptions& options) {
  params.Validate();
  const LocationSet& gt = RequireGroundTruth(instance);
  gt.RequireDistinct();
  const ViewGraph& graph = instance.graph;
  const std::size_t n = graph.num_vertices();
  const double nd = static_cast<double>(n);

  ConditionReport report;
  report.name = "good-shape";

  // 1
  ConditionReport typical = CheckPTypical(graph, params.p);
  typical.name = "property-1 p-typical";
  report.children.push_back(std::move(typical));

  // 2
  {
    ConditionReport prop;
    prop.name = "property-2 large-angles";
    std::vector<Point3> dir(n * n, Point3::Zero());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) dir[i * n + j] = (gt[i] - gt[j]).normalized();
      }
    }
    const double beta2 = params.beta * params.beta;
    std::size_t worst = 0;
    std::size_t wi = 0;
    std::size_t wj = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Point3& gij = dir[i * n + j];
        std::size_t failing = 0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          if (1.0 - gij.dot(dir[i * n + k]) < beta2 || 1.0 - gij.dot(dir[j * n + k]) < beta2) {
            ++failing;
          }
        }
        if (failing > worst) {
          worst = failing;
          wi = i;
          wj = j;
        }
      }
    }
    prop.Add("max_failing_indices", static_cast<double>(worst));
    prop.Add("allowed", params.epsilon_1 * nd);
    prop.verdict = static_cast<double>(worst) <= params.epsilon_1 * nd ? Verdict::kPass : Verdict::kFail;
    if (prop.verdict == Verdict::kFail) prop.Note("worst pair " + Pair(wi, wj));
    report.children.push_back(std::move(prop));
  }

  // 3
  {
    ConditionReport prop;
    prop.name = "property-3 bounded-distances";
    const double mu = MeanPairwiseDistance(gt);
    double max_dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) max_dist = std::max(max_dist, (gt[i] - gt[j]).norm());
    }
    prop.Add("max_over_mu", max_dist / mu);
    prop.Add("mu", mu);
    prop.Add("max_distance", max_dist);
    prop.Add("c_0", params.c_0);
    prop.verdict = max_dist <= params.c_0 * mu ? Verdict::kPass : Verdict::kFail;
    report.children.push_back(std::move(prop));
  }

  // 4
  {
    ConditionReport prop;
    prop.name = "property-4 short-or-bad-degree";
    const EdgePartition part = GoodLongPartition(instance, c_star);
    const double log_n = std::log(nd);
    prop.Add("epsilon_0", part.epsilon_0);
    prop.Add("epsilon_0_bound", params.epsilon_0);
    prop.Add("epsilon_0_log3n_over_p2", part.epsilon_0 * log_n * log_n * log_n / (params.p * params.p));
    prop.Add("good_long_edges", static_cast<double>(part.good_long.size()));
    prop.verdict = part.epsilon_0 <= params.epsilon_0 ? Verdict::kPass : Verdict::kFail;
    report.children.push_back(std::move(prop));
  }

  // 5
  {
    ConditionReport prop;
    prop.name = "property-5 well-distributed";
    ViewGraph complete(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        complete.AddEdge(i, j, PairwiseDirection(gt[i], gt[j]));
      }
    }
    const auto along_g = WellDistributedAlong(graph, gt, options.well_distributed_samples, rng);
    const auto along_k = WellDistributedAlong(complete, gt, options.well_distributed_samples, rng);
    prop.Add("c_along_graph", along_g.min_value);
    prop.Add("c_along_complete", along_k.min_value);
    prop.Add("c_1", params.c_1);
    if (along_g.empty_pairs > 0) {
      prop.Note(std::to_string(along_g.empty_pairs) + " vertex pairs have no common neighbour");
    }
    if (along_g.degenerate_pairs + along_k.degenerate_pairs > 0) {
      prop.Note("collinear triples make some projection subspaces degenerate");
    }
    const bool ok = along_g.min_value >= params.c_1 && along_k.min_value >= params.c_1;
    prop.verdict = ok ? Verdict::kPass : Verdict::kFail;
    if (!ok) {
      const auto& w = along_g.min_value < params.c_1 ? along_g : along_k;
      prop.Note("worst pair " + Pair(w.worst_i, w.worst_j));
    }
    report.children.push_back(std::move(prop));
  }

  // 6
  {
    ConditionReport prop;
    prop.name = "property-6 no-collinear-triple";
    std::size_t found = 0;
    for (std::size_t i = 0; i < n && found == 0; ++i) {
      for (std::size_t j = i + 1; j < n && found == 0; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          if (Collinear(gt[i], gt[j], gt[k])) {
            prop.Note("collinear triple (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                      std::to_string(k) + ")");
            found = 1;
            break;
          }
        }
      }
    }
    prop.Add("collinear_triples_found", static_cast<double>(found));
    prop.verdict = found == 0 ? Verdict::kPass : Verdict::kFail;
    report.children.push_back(std::move(prop));
  }

  {
    ConditionReport prop;
    prop.name = "parameter-inequality";
    prop.Add("epsilon_0", params.epsilon_0);
    prop.Add("epsilon_0_bound", params.Epsilon0Bound());
    prop.Add("epsilon_1", params.epsilon_1);
    prop.Add("epsilon_1_bound", params.Epsilon1Bound());
    const bool ok = params.epsilon_0 <= params.Epsilon0Bound() * (1.0 + 1e-12) &&
                    params.epsilon_1 <= params.Epsilon1Bound() * (1.0 + 1e-12);
    prop.verdict = ok ? Verdict::kPass : Verdict::kFail;
    report.children.push_back(std::move(prop));
  }

  report.Add("c_star", c_star);
  report.verdict = ConditionReport::Combine(report.children);
  return report;
}

MotionDecomposition DecomposeMotion(const LocationSet& gt, std::span<const Point3> eps) {
  const std::size_t n = gt.size();
  if (eps.size() != n) throw Error(ErrorKind::kPrecondition, "perturbation count mismatch");
  MotionDecomposition out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point3 tij = gt[i] - gt[j];
      const double len = tij.norm();
      if (len < kCoincidentTolerance) {
        throw Error(ErrorKind::kCoincidentPoints, "coincident ground-truth points");
      }
      const Point3 g = tij / len;
      const Point3 d = eps[i] - eps[j];
      out.pairs.emplace_back(i, j);
      out.eta.push_back((d - d.dot(g) * g).norm());
      out.delta.push_back(d.dot(g) / len);
    }
  }
  return out;
}

std::vector<Point3> ProjectPerturbation(const LocationSet& gt, std::span<const Point3> eps) {
  const std::size_t n = gt.size();
  if (eps.size() != n) throw Error(ErrorKind::kPrecondition, "perturbation count mismatch");
  const LocationSet centered = Center(gt);
  Point3 mean = Point3::Zero();
  for (const auto& e : eps) mean += e;
  mean /= static_cast<double>(n);
  std::vector<Point3> out(eps.begin(), eps.end());
  double dot = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] -= mean;
    dot += out[i].dot(centered[i]);
    norm2 += centered[i].squaredNorm();
  }
  if (norm2 > 0.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] -= (dot / norm2) * centered[i];
  }
  return out;
}

ConditionReport CheckDominance(const Instance& instance, double c_star,
                               const DominanceOptions& options) {
  const LocationSet& gt = RequireGroundTruth(instance);
  const ViewGraph& graph = instance.graph;
  const std::size_t n = graph.num_vertices();
  const EdgePartition part = GoodLongPartition(instance, c_star);

  ConditionReport report;
  report.name = "good-long-dominance";
  report.Add("good_long_edges", static_cast<double>(part.good_long.size()));
  report.Add("complement_edges", static_cast<double>(part.complement.size()));
  report.Add("epsilon_0", part.epsilon_0);
  if (part.complement.empty()) {
    report.verdict = Verdict::kPass;
    report.Note("every edge is good and long; the right-hand side vanishes");
    return report;
  }

  std::vector<Point3> gamma_star(graph.num_edges());
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const Edge& e = graph.edge(k);
    gamma_star[k] = (gt[e.i] - gt[e.j]).normalized();
  }

  double min_margin = std::numeric_limits<double>::infinity();
  double min_sufficient_margin = std::numeric_limits<double>::infinity();
  std::size_t sufficient_violations = 0;
  std::size_t tried = 0;
  std::optional<std::size_t> violation;
  std::normal_distribution<double> normal;
  std::vector<Point3> raw(n);
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    Rng rng = MakeSubStream(options.seed, trial);
    for (auto& v : raw) v = Point3(normal(rng), normal(rng), normal(rng));
    const auto eps = ProjectPerturbation(gt, raw);
    ++tried;
    double lhs = 0.0;
    for (std::size_t k : part.good_long) {
      const Edge& e = graph.edge(k);
      const Point3 d = eps[e.i] - eps[e.j];
      lhs += (d - d.dot(gamma_star[k]) * gamma_star[k]).norm();
    }
    double rhs = 0.0;
    double parallel = 0.0;
    for (std::size_t k : part.complement) {
      const Edge& e = graph.edge(k);
      const Point3 d = eps[e.i] - eps[e.j];
      rhs += d.norm();
      parallel += std::abs(d.dot(gamma_star[k]));
    }
    const double scale = lhs + rhs;
    if (scale == 0.0) continue;
    const double margin = (lhs - rhs) / scale;
    min_margin = std::min(min_margin, margin);
    const double sufficient = lhs - 2.0 * parallel;
    min_sufficient_margin = std::min(min_sufficient_margin, sufficient / (lhs + 2.0 * parallel));
    if (sufficient < -1e-12 * scale) ++sufficient_violations;
    if (lhs < rhs - 1e-12 * scale) {
      violation = trial;
      break;
    }
  }

  report.Add("trials_run", static_cast<double>(tried));
  report.Add("min_relative_margin", min_margin);
  report.Add("min_sufficient_margin", min_sufficient_margin);
  report.Add("sufficient_violations", static_cast<double>(sufficient_violations));
  if (violation) {
    report.verdict = Verdict::kFail;
    report.Note("perturbation from trial " + std::to_string(*violation) + " violates the inequality");
  } else {
    report.verdict = Verdict::kUndetermined;
    report.Note("no violation in " + std::to_string(tried) + " random perturbations");
  }
  return report;
}

}  // namespace ludrec
