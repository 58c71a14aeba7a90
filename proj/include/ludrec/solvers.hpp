#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "ludrec/geometry.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec {

enum class Method { kLud, kShapeFit };
enum class SolverStatus { kConverged, kMaxIters };

std::string_view ToString(Method method);
std::string_view ToString(SolverStatus status);
/// Accepts "lud" / "shapefit" (case-insensitive); throws kParse otherwise.
Method ParseMethod(std::string_view text);
SolverStatus ParseStatus(std::string_view text);

struct SolverParams {
  std::size_t max_iters = 50000;
  /// Tolerances on the RMS primal and dual ADMM residuals.
  double primal_tol = 1e-8;
  double dual_tol = 1e-8;
  /// Initial penalty of the augmented Lagrangian.
  double rho = 1.0;
  /// Residual balancing period; 0 disables rho adaptation.
  std::size_t rescale_interval = 100;

  void Validate() const;
};

struct ResidualPair {
  double primal = 0.0;
  double dual = 0.0;
};

struct SolverResult {
  LocationSet locations;
  /// One alpha per edge (edge order of the graph); empty for ShapeFit.
  std::vector<double> alphas;
  double objective = 0.0;
  std::size_t iterations = 0;
  SolverStatus status = SolverStatus::kMaxIters;
  std::vector<ResidualPair> residual_history;
};

/// argmin_{alpha >= 1} |d - alpha gamma| = max(1, <gamma, d>).
double OptimalAlpha(const UnitVector3& gamma, const Point3& d);

/// Distance from d to the ray {alpha gamma : alpha >= 1}; the LUD term of one
/// edge once alpha is eliminated.
double Fij(const UnitVector3& gamma, const Point3& d);

/// sum_ij f_ij(t_i - t_j).
double LudObjective(const ViewGraph& graph, const LocationSet& locs);

/// sum_ij |P_{gamma_ij perp}(t_i - t_j)|.
double ShapeFitObjective(const ViewGraph& graph, const LocationSet& locs);

double Objective(Method method, const ViewGraph& graph, const LocationSet& locs);

/// LUD: min sum |t_i - t_j - alpha_ij gamma_ij| s.t. alpha_ij >= 1,
/// sum t_i = 0. Throws kDisconnectedGraph for disconnected input; running
/// out of iterations is reported through `status`.
SolverResult SolveLud(const ViewGraph& graph, const SolverParams& params = {});

/// ShapeFit: min sum |P_perp(t_i - t_j)| s.t.
/// sum <t_i - t_j, gamma_ij> = 1 and sum t_i = 0.
SolverResult SolveShapeFit(const ViewGraph& graph, const SolverParams& params = {});

SolverResult Solve(Method method, const ViewGraph& graph, const SolverParams& params = {});

/// Slow projected-subgradient reference used to validate the ADMM solvers.
/// Limited to n <= 12; returns the best iterate found.
SolverResult SolveReference(const ViewGraph& graph, Method method, std::size_t iters);

inline constexpr std::size_t kReferenceMaxVertices = 12;

}  // namespace ludrec
