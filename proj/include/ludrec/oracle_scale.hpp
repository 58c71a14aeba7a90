#pragma once

#include <cstddef>
#include <vector>

#include "ludrec/view_graph.hpp"

namespace ludrec {

/// Upper end of the scale search; a minimizer set unbounded above is
/// truncated here.
inline constexpr double kOracleScanBound = 1e6;
/// Minimizer intervals narrower than this are reported as unique.
inline constexpr double kOracleUniqueWidth = 1e-8;

struct OracleScaleResult {
  double c_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool unique = false;
  /// True when hi was clipped at kOracleScanBound.
  bool truncated = false;
  double objective_at_c = 0.0;
};

/// Sum over edges of f_ij(c t*_i, c t*_j).
double OracleObjective(const Instance& instance, double c);

/// Minimizes c -> OracleObjective(instance, c). The minimizer set is a closed
/// interval located by bisection on the monotone one-sided derivatives;
/// c_star is its midpoint. Throws kEmptyEdgeSet without edges, kPrecondition
/// without ground truth and kDegenerateScale when the midpoint is not
/// positive.
OracleScaleResult OracleScale(const Instance& instance);

struct EdgePartition {
  /// Edge indices of good edges with |t*_i - t*_j| > 1 / c_star.
  std::vector<std::size_t> good_long;
  std::vector<std::size_t> complement;
  /// Max vertex degree within the complement, divided by n.
  double epsilon_0 = 0.0;
};

EdgePartition GoodLongPartition(const Instance& instance, double c_star);

}  // namespace ludrec
