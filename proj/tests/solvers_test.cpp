#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ludrec/error.hpp"
#include "ludrec/oracle_scale.hpp"
#include "ludrec/solvers.hpp"
#include "support.hpp"

using namespace ludrec;

namespace {

// K_4 with one corrupted edge (seed 11). Objective values of the reference
// solver run for 10^6 iterations, frozen as regression fixtures.
constexpr double kK4LudReference = 1.7860286849460738;
constexpr double kK4ShapeFitReference = 0.20497049876074691;

Instance K4OneBadEdge() {
  HlvParams params;
  params.n = 4;
  params.p = 1.0;
  params.corruption = EdgeFraction{0.17};
  params.seed = 11;
  return GenerateInstance(params);
}

Instance Triangle() {
  const LocationSet locs({{0, 0, 0}, {1.3, 0.2, -0.4}, {0.1, 2.0, 0.7}});
  return MakeCleanInstance(locs, testing::CompleteEdges(3));
}

double RelGap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("optimal alpha") {
  const auto x = UnitVector3::Normalize({1, 0, 0});
  CHECK(OptimalAlpha(x, {2, 0, 0}) == 2.0);
  CHECK(OptimalAlpha(x, {0, 1, 0}) == 1.0);
  CHECK(OptimalAlpha(x, {3, 4, 0}) == 3.0);
}

TEST_CASE("f_ij") {
  const auto x = UnitVector3::Normalize({1, 0, 0});
  CHECK(Fij(x, {3, 4, 0}) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(Fij(x, {0, 1, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(Fij(x, {1, 0, 0}) == 0.0);
  CHECK(Fij(x, {-2, 0, 0}) == 3.0);
}

TEST_CASE("solver parameter validation") {
  SolverParams params;
  params.primal_tol = 0.0;
  CHECK_THROWS_AS(params.Validate(), Error);
  params = {};
  params.max_iters = 0;
  CHECK_THROWS_AS(params.Validate(), Error);
  params = {};
  params.rho = -1.0;
  CHECK_THROWS_AS(params.Validate(), Error);
  CHECK(ParseMethod("LUD") == Method::kLud);
  CHECK(ParseMethod("shapefit") == Method::kShapeFit);
  CHECK_THROWS_AS(ParseMethod("cvx"), Error);
}

TEST_CASE("triangle is recovered exactly") {
  const auto inst = Triangle();
  for (Method m : {Method::kLud, Method::kShapeFit}) {
    const auto r = Solve(m, inst.graph);
    CHECK(r.status == SolverStatus::kConverged);
    CHECK(Nrmse(r.locations, *inst.ground_truth).value <= 1e-4);
    CHECK(r.locations.Mean().norm() <= 1e-9);
  }
  const auto ref = SolveReference(inst.graph, Method::kLud, 100000);
  CHECK(ref.objective <= 1e-6);
}

TEST_CASE("K4 with one bad edge matches the frozen reference") {
  const auto inst = K4OneBadEdge();
  REQUIRE(inst.graph.CountBad() == 1);
  const auto lud = SolveLud(inst.graph);
  const auto sf = SolveShapeFit(inst.graph);
  CHECK(RelGap(lud.objective, kK4LudReference) <= 1e-5);
  CHECK(RelGap(sf.objective, kK4ShapeFitReference) <= 1e-5);
  // The reference never beats the ADMM solution by more than the tolerance.
  CHECK(kK4LudReference >= lud.objective - 1e-5);
  CHECK(kK4ShapeFitReference >= sf.objective - 1e-5);
}

TEST_CASE("LUD result invariants") {
  HlvParams params;
  params.n = 12;
  params.p = 0.6;
  params.corruption = EdgeFraction{0.2};
  params.noise_sigma = 0.05;
  params.seed = 21;
  const auto inst = GenerateInstance(params);
  const auto r = SolveLud(inst.graph);
  REQUIRE(r.alphas.size() == inst.graph.num_edges());
  for (double a : r.alphas) CHECK(a >= 1.0 - 1e-9);
  CHECK(r.locations.Mean().norm() <= 1e-9);
  CHECK(std::abs(r.objective - LudObjective(inst.graph, r.locations)) <= 1e-9);

  double with_alpha = 0.0;
  for (std::size_t e = 0; e < inst.graph.num_edges(); ++e) {
    const auto& edge = inst.graph.edge(e);
    const Point3 d = r.locations[edge.i] - r.locations[edge.j];
    with_alpha += (d - r.alphas[e] * edge.direction.vec()).norm();
  }
  CHECK(std::abs(with_alpha - r.objective) < 1e-8);

  // The scaled ground truth is feasible, so the optimum is no worse.
  const double c = OracleScale(inst).c_star;
  CHECK(r.objective <= OracleObjective(inst, c) + 1e-6);
}

TEST_CASE("ShapeFit result invariants") {
  HlvParams params;
  params.n = 12;
  params.p = 0.6;
  params.corruption = EdgeFraction{0.2};
  params.seed = 22;
  const auto inst = GenerateInstance(params);
  const auto r = SolveShapeFit(inst.graph);
  CHECK(r.alphas.empty());
  CHECK(r.locations.Mean().norm() <= 1e-9);
  double scale = 0.0;
  for (const auto& e : inst.graph.edges()) {
    scale += (r.locations[e.i] - r.locations[e.j]).dot(e.direction.vec());
  }
  CHECK(std::abs(scale - 1.0) <= 1e-6);
  CHECK(std::abs(r.objective - ShapeFitObjective(inst.graph, r.locations)) <= 1e-9);
}

TEST_CASE("disconnected and empty graphs are refused") {
  ViewGraph g(4);
  g.AddEdge(0, 1, UnitVector3());
  g.AddEdge(2, 3, UnitVector3());
  for (Method m : {Method::kLud, Method::kShapeFit}) {
    try {
      Solve(m, g);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDisconnectedGraph);
    }
  }
  CHECK_THROWS_AS(SolveReference(ViewGraph(13), Method::kLud, 10), Error);
}

TEST_CASE("running out of iterations is a status, not an error") {
  HlvParams params;
  params.n = 20;
  params.corruption = EdgeFraction{0.3};
  params.seed = 3;
  const auto inst = GenerateInstance(params);
  SolverParams sp;
  sp.max_iters = 5;
  const auto r = SolveLud(inst.graph, sp);
  CHECK(r.status == SolverStatus::kMaxIters);
  CHECK(r.iterations == 5);
  CHECK(r.residual_history.size() == 5);
}

TEST_CASE("two vertices") {
  ViewGraph g(2);
  g.AddEdge(0, 1, UnitVector3::Normalize({0, 1, 0}));
  const auto r = SolveLud(g);
  CHECK(r.objective <= 1e-8);
  const Point3 d = r.locations[0] - r.locations[1];
  CHECK(d.normalized().y() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("low-noise ordering of ShapeFit and LUD") {
  std::vector<double> lud, sf;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    HlvParams params;
    params.n = 50;
    params.p = 0.5;
    params.noise_sigma = 0.05;
    params.seed = seed;
    const auto inst = GenerateInstance(params);
    lud.push_back(Nrmse(SolveLud(inst.graph).locations, *inst.ground_truth).value);
    sf.push_back(Nrmse(SolveShapeFit(inst.graph).locations, *inst.ground_truth).value);
  }
  std::sort(lud.begin(), lud.end());
  std::sort(sf.begin(), sf.end());
  const double lud_med = 0.5 * (lud[4] + lud[5]), sf_med = 0.5 * (sf[4] + sf[5]);
  CHECK(sf_med <= lud_med + 0.1);
  CHECK(lud_med < 1.0);
  CHECK(sf_med < 1.0);
}

}  // TEST_SUITE
