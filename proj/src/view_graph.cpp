#include "ludrec/view_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ludrec/error.hpp"

namespace ludrec {

void ViewGraph::AddEdge(std::size_t a, std::size_t b,
                        const UnitVector3& direction_ab, EdgeLabel label) {
  if (a == b) {
    throw Error(ErrorKind::kPrecondition, "self-loop on vertex " + std::to_string(a));
  }
  if (a >= n_ || b >= n_) {
    throw Error(ErrorKind::kPrecondition,
                "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                    ") out of range for n = " + std::to_string(n_));
  }
  const bool flip = a > b;
  const std::size_t i = flip ? b : a;
  const std::size_t j = flip ? a : b;
  if (!index_.emplace(Key(i, j), edges_.size()).second) {
    throw Error(ErrorKind::kPrecondition,
                "duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  edges_.push_back(Edge{i, j, flip ? -direction_ab : direction_ab, label});
}

UnitVector3 ViewGraph::Direction(std::size_t from, std::size_t to) const {
  const auto e = FindEdge(from, to);
  if (!e) {
    throw Error(ErrorKind::kPrecondition,
                "no edge (" + std::to_string(from) + ", " + std::to_string(to) + ")");
  }
  const Edge& edge = edges_[*e];
  return edge.i == from ? edge.direction : -edge.direction;
}

std::optional<std::size_t> ViewGraph::FindEdge(std::size_t a, std::size_t b) const {
  const auto it = index_.find(a < b ? Key(a, b) : Key(b, a));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> ViewGraph::Degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

std::vector<std::vector<std::size_t>> ViewGraph::Adjacency() const {
  std::vector<std::vector<std::size_t>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

bool ViewGraph::IsConnected() const {
  if (n_ == 0) return true;
  // Union-find over the edge list.
  std::vector<std::size_t> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = n_;
  for (const auto& e : edges_) {
    const std::size_t a = find(e.i);
    const std::size_t b = find(e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::size_t ViewGraph::CountBad() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.good(); }));
}

void HlvParams::Validate() const {
  if (n < 2) throw Error(ErrorKind::kPrecondition, "n must be at least 2");
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kPrecondition, "p must lie in (0, 1]");
  }
  if (!(noise_sigma >= 0.0 && noise_sigma <= 1.0)) {
    throw Error(ErrorKind::kPrecondition, "sigma must lie in [0, 1]");
  }
  std::visit(
      [](const auto& mode) {
        using T = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<T, MaxDegreeBound>) {
          if (!(mode.epsilon_b >= 0.0 && mode.epsilon_b <= 1.0)) {
            throw Error(ErrorKind::kPrecondition, "epsilon_b must lie in [0, 1]");
          }
        } else {
          if (!(mode.q >= 0.0 && mode.q <= 1.0)) {
            throw Error(ErrorKind::kPrecondition, "corruption fraction must lie in [0, 1]");
          }
        }
      },
      corruption);
}

UnitVector3 UniformSphere(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const Point3 v(normal(rng), normal(rng), normal(rng));
    if (v.norm() > 1e-12) return UnitVector3::Normalize(v);
  }
}

LocationSet SampleLocations(std::size_t n, Rng& rng) {
  if (n < 2) throw Error(ErrorKind::kPrecondition, "need at least two locations");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point3> pts(n);
  for (auto& p : pts) {
    const double x = normal(rng);
    const double y = normal(rng);
    const double z = normal(rng);
    p = Point3(x, y, z);
  }
  return LocationSet(std::move(pts));
}

std::vector<std::pair<std::size_t, std::size_t>> SampleGraph(std::size_t n,
                                                             double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kPrecondition, "p must lie in (0, 1]");
  }
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

Instance MakeCleanInstance(const LocationSet& ground_truth,
                           std::span<const std::pair<std::size_t, std::size_t>> edges) {
  Instance inst;
  inst.graph = ViewGraph(ground_truth.size());
  for (const auto& [i, j] : edges) {
    inst.graph.AddEdge(i, j, PairwiseDirection(ground_truth[i], ground_truth[j]));
  }
  inst.params.n = ground_truth.size();
  inst.ground_truth = ground_truth;
  return inst;
}

Instance Corrupt(Instance instance, const CorruptionMode& mode, Rng& rng,
                 const CorruptedDirectionSampler& sampler) {
  ViewGraph& graph = instance.graph;
  const std::size_t m = graph.num_edges();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> selected;
  if (const auto* frac = std::get_if<EdgeFraction>(&mode)) {
    if (!(frac->q >= 0.0 && frac->q <= 1.0)) {
      throw Error(ErrorKind::kPrecondition, "corruption fraction must lie in [0, 1]");
    }
    const auto count = static_cast<std::size_t>(std::floor(frac->q * static_cast<double>(m)));
    selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    const auto& bound = std::get<MaxDegreeBound>(mode);
    if (!(bound.epsilon_b >= 0.0 && bound.epsilon_b <= 1.0)) {
      throw Error(ErrorKind::kPrecondition, "epsilon_b must lie in [0, 1]");
    }
    const auto cap = static_cast<std::size_t>(
        std::floor(bound.epsilon_b * static_cast<double>(graph.num_vertices())));
    std::vector<std::size_t> bad_degree(graph.num_vertices(), 0);
    for (const auto& [i, j, dir, label] : graph.edges()) {
      if (label == EdgeLabel::kBad) {
        ++bad_degree[i];
        ++bad_degree[j];
      }
    }
    for (std::size_t e : order) {
      const Edge& edge = graph.edge(e);
      if (!edge.good()) continue;
      if (bad_degree[edge.i] + 1 > cap || bad_degree[edge.j] + 1 > cap) continue;
      ++bad_degree[edge.i];
      ++bad_degree[edge.j];
      selected.push_back(e);
    }
    if (bound.epsilon_b > 0.0 && m > 0 && selected.empty() && graph.CountBad() == 0) {
      throw Error(ErrorKind::kInfeasibleBound,
                  "max-degree bound floor(eps_b * n) = " + std::to_string(cap) +
                      " admits no corrupted edge");
    }
  }

  std::sort(selected.begin(), selected.end());
  for (std::size_t e : selected) {
    const UnitVector3 dir = sampler ? sampler(graph.edge(e), rng) : UniformSphere(rng);
    graph.SetDirection(e, dir);
    graph.SetLabel(e, EdgeLabel::kBad);
  }
  instance.params.corruption = mode;
  return instance;
}

Instance AddNoise(Instance instance, double sigma, Rng& rng, const NoiseSampler& sampler) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::kPrecondition, "sigma must be >= 0");
  instance.params.noise_sigma = sigma;
  if (sigma == 0.0) return instance;
  ViewGraph& graph = instance.graph;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    if (!edge.good()) continue;
    for (;;) {
      const UnitVector3 v = sampler ? sampler(rng) : UniformSphere(rng);
      const Point3 perturbed = edge.direction.vec() + sigma * v.vec();
      if (perturbed.norm() >= 1e-12) {
        graph.SetDirection(e, UnitVector3::Normalize(perturbed));
        break;
      }
    }
  }
  return instance;
}

double EpsilonB(const ViewGraph& graph) {
  if (graph.num_vertices() == 0) return 0.0;
  std::vector<std::size_t> bad_degree(graph.num_vertices(), 0);
  for (const auto& e : graph.edges()) {
    if (!e.good()) {
      ++bad_degree[e.i];
      ++bad_degree[e.j];
    }
  }
  const std::size_t max_deg = *std::max_element(bad_degree.begin(), bad_degree.end());
  return static_cast<double>(max_deg) / static_cast<double>(graph.num_vertices());
}

Instance GenerateInstance(const HlvParams& params, const CorruptedDirectionSampler& sampler) {
  params.Validate();
  Rng loc_rng = MakeStream(params.seed, Stream::kLocations);
  Rng graph_rng = MakeStream(params.seed, Stream::kGraph);
  Rng corrupt_rng = MakeStream(params.seed, Stream::kCorruption);
  Rng noise_rng = MakeStream(params.seed, Stream::kNoise);

  const LocationSet gt = SampleLocations(params.n, loc_rng);
  const auto edges = SampleGraph(params.n, params.p, graph_rng);
  Instance inst = MakeCleanInstance(gt, edges);
  inst = Corrupt(std::move(inst), params.corruption, corrupt_rng, sampler);
  inst = AddNoise(std::move(inst), params.noise_sigma, noise_rng);
  inst.params = params;
  return inst;
}

}  // namespace ludrec
