#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "ludrec/geometry.hpp"
#include "ludrec/rng.hpp"

namespace ludrec {

enum class EdgeLabel { kGood, kBad };

/// Undirected measurement edge stored with i < j. `direction` is gamma_ij,
/// the direction of t_i - t_j; the reverse orientation is its negation.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  UnitVector3 direction;
  EdgeLabel label = EdgeLabel::kGood;

  bool good() const { return label == EdgeLabel::kGood; }
};

/// Direction-labeled graph on vertices [0, n).
class ViewGraph {
 public:
  ViewGraph() = default;
  explicit ViewGraph(std::size_t n) : n_(n) {}

  /// Adds edge {a, b}. `direction_ab` is the direction of t_a - t_b; it is
  /// negated when a > b so storage stays canonical. Throws on self-loops,
  /// out-of-range indices and duplicate pairs.
  void AddEdge(std::size_t a, std::size_t b, const UnitVector3& direction_ab,
               EdgeLabel label = EdgeLabel::kGood);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  void SetDirection(std::size_t e, const UnitVector3& direction_ij) {
    edges_[e].direction = direction_ij;
  }
  void SetLabel(std::size_t e, EdgeLabel label) { edges_[e].label = label; }

  /// Direction of t_from - t_to for an existing edge, respecting orientation.
  UnitVector3 Direction(std::size_t from, std::size_t to) const;

  /// Index of edge {a, b}, if present.
  std::optional<std::size_t> FindEdge(std::size_t a, std::size_t b) const;

  std::vector<std::size_t> Degrees() const;
  std::vector<std::vector<std::size_t>> Adjacency() const;
  bool IsConnected() const;

  std::size_t CountBad() const;

 private:
  static std::uint64_t Key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct MaxDegreeBound {
  double epsilon_b = 0.0;
};
struct EdgeFraction {
  double q = 0.0;
};
using CorruptionMode = std::variant<MaxDegreeBound, EdgeFraction>;

struct HlvParams {
  std::size_t n = 50;
  double p = 0.5;
  CorruptionMode corruption = EdgeFraction{0.0};
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws kPrecondition when a field is outside its domain.
  void Validate() const;
};

struct Instance {
  /// Absent for graphs read from files without vertex records.
  std::optional<LocationSet> ground_truth;
  ViewGraph graph;
  HlvParams params;
};

/// Draws the direction assigned to a corrupted edge.
using CorruptedDirectionSampler = std::function<UnitVector3(const Edge&, Rng&)>;
/// Draws the noise vector v_ij for a good edge.
using NoiseSampler = std::function<UnitVector3(Rng&)>;

/// Uniform draw on the unit sphere (normalized standard Gaussian).
UnitVector3 UniformSphere(Rng& rng);

/// n i.i.d. N(0, I_3) points.
LocationSet SampleLocations(std::size_t n, Rng& rng);

/// Erdos-Renyi G(n, p) edge list, pairs (i, j) with i < j in lexicographic
/// order.
std::vector<std::pair<std::size_t, std::size_t>> SampleGraph(std::size_t n,
                                                             double p, Rng& rng);

/// Uncorrupted, noiseless instance on the given edges.
Instance MakeCleanInstance(const LocationSet& ground_truth,
                           std::span<const std::pair<std::size_t, std::size_t>> edges);

/// Selects E_b according to `mode` and replaces each selected direction with
/// a draw from `sampler` (uniform sphere when empty).
///
/// EdgeFraction(q) picks exactly floor(q |E|) edges uniformly at random.
/// MaxDegreeBound(eps) scans the edges in random order and keeps every edge
/// whose endpoints both stay at bad-degree <= floor(eps n); the result is a
/// maximal set under that cap. Throws kInfeasibleBound when eps > 0, the
/// graph has edges, and the cap admits none of them.
Instance Corrupt(Instance instance, const CorruptionMode& mode, Rng& rng,
                 const CorruptedDirectionSampler& sampler = {});

/// Replaces every good direction g by (g + sigma v) / |g + sigma v| with v
/// uniform on the sphere. A draw with |g + sigma v| < 1e-12 is rejected and
/// redrawn.
Instance AddNoise(Instance instance, double sigma, Rng& rng,
                  const NoiseSampler& sampler = {});

/// (maximal bad-edge degree) / n.
double EpsilonB(const ViewGraph& graph);

/// Full HLV pipeline: locations, G(n, p), corruption, noise; each stage on
/// its own stream of params.seed.
Instance GenerateInstance(const HlvParams& params,
                          const CorruptedDirectionSampler& sampler = {});

}  // namespace ludrec
