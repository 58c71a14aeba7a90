#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ludrec/conditions.hpp"
#include "ludrec/geometry.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec {

/// sigma_k counts as zero below this multiple of sigma_1.
inline constexpr double kRankThreshold = 1e-10;

struct RigidityAnalysis {
  std::size_t rank = 0;
  std::size_t nullity = 0;
  bool rigid = false;
  /// Orthonormal basis (3n x nullity) of the solution space of
  /// P_perp(t_i - t_j) = 0; coordinates are ordered (x0, y0, z0, x1, ...).
  Eigen::MatrixXd nullspace;
};

/// Rank analysis of the direction-constraint system (two rows per edge).
RigidityAnalysis AnalyzeRigidity(const ViewGraph& graph);

ConditionReport ParallelRigidity(const ViewGraph& graph);

/// Same test with every direction replaced by the one implied by `locs`.
ConditionReport ParallelRigidity(const ViewGraph& graph, const LocationSet& locs);

/// Triangle/quadrilateral gluing certificate. Returns the construction steps
/// when every vertex is reached, nullopt otherwise. Valid for generic
/// directions only; the rank test is authoritative.
std::optional<std::vector<std::string>> HennebergCertificate(const ViewGraph& graph);

struct SelfConsistencyResult {
  ConditionReport report;
  /// Realizing locations (sum zero, sum of edge lengths along gamma = 1).
  std::optional<LocationSet> witness;
};

/// Decides whether the directions are realized by locations that are not
/// all identical. Throws kDisconnectedGraph on disconnected input.
SelfConsistencyResult SelfConsistency(const ViewGraph& graph);

/// |S_i| = #{j != i : t*_i - t*_j is a positive multiple of t'_i - t'_j}.
std::vector<std::size_t> UndeformedSetSizes(const LocationSet& gt, const LocationSet& witness);

}  // namespace ludrec
