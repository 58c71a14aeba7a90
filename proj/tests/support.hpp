#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ludrec/geometry.hpp"
#include "ludrec/rng.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec::testing {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Number of randomized cases per property.
inline constexpr int kPropertyCases = 1000;

Point3 GaussianPoint(Rng& rng);
LocationSet RandomLocations(std::size_t n, Rng& rng);

std::vector<std::pair<std::size_t, std::size_t>> CompleteEdges(std::size_t n);
std::vector<std::pair<std::size_t, std::size_t>> PathEdges(std::size_t n);

/// Graph with directions implied by `locs` on the given edges.
ViewGraph GraphFrom(const LocationSet& locs,
                    const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// Grid-search minimizer of the oracle objective: 10^6 log-spaced points on
/// [1e-3, 1e3] followed by golden-section refinement around the best one.
double GridOracleScale(const Instance& instance);

/// Smallest ratio (1/|A|) sum |P_{span(t-x,t-y) perp} h| / |P_{(x-y) perp} h|
/// over `samples` uniform sphere directions.
double BruteForceWellDistributed(const std::vector<Point3>& A, const Point3& x, const Point3& y,
                                 std::size_t samples, Rng& rng);

}  // namespace ludrec::testing
