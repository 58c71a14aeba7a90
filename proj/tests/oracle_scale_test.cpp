#include <doctest.h>

#include <cmath>

#include "ludrec/error.hpp"
#include "ludrec/oracle_scale.hpp"
#include "support.hpp"

using namespace ludrec;

namespace {

Instance SixWithOneBadEdge(std::uint64_t seed) {
  HlvParams params;
  params.n = 6;
  params.p = 1.0;
  params.corruption = EdgeFraction{0.07};
  params.seed = seed;
  return GenerateInstance(params);
}

}  // namespace

TEST_SUITE("oracle-scale") {

TEST_CASE("single good edge has an unbounded minimizer set") {
  const auto inst = MakeCleanInstance(LocationSet({{2, 0, 0}, {0, 0, 0}}), testing::EdgeList{{0, 1}});
  const auto r = OracleScale(inst);
  CHECK(r.lo == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.hi == kOracleScanBound);
  CHECK(r.truncated);
  CHECK(!r.unique);
  CHECK(r.objective_at_c == 0.0);
  CHECK(OracleObjective(inst, 0.25) == doctest::Approx(0.5));
}

TEST_CASE("errors") {
  Instance empty = MakeCleanInstance(LocationSet({{1, 0, 0}, {0, 0, 0}}), {});
  CHECK_THROWS_AS(OracleScale(empty), Error);
  Instance no_truth = MakeCleanInstance(LocationSet({{1, 0, 0}, {0, 0, 0}}), testing::EdgeList{{0, 1}});
  no_truth.ground_truth.reset();
  CHECK_THROWS_AS(OracleScale(no_truth), Error);
}

TEST_CASE("uncorrupted instances have a non-unique scale") {
  HlvParams params;
  params.n = 10;
  params.p = 0.7;
  params.seed = 4;
  const auto r = OracleScale(GenerateInstance(params));
  CHECK(!r.unique);
  CHECK(r.hi - r.lo > 1e-6);
  CHECK(r.lo <= r.c_star);
  CHECK(r.c_star <= r.hi);
}

TEST_CASE("c_star matches the grid-search oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = SixWithOneBadEdge(seed);
    REQUIRE(inst.graph.CountBad() == 1);
    const auto r = OracleScale(inst);
    const double grid = testing::GridOracleScale(inst);
    CHECK(r.unique);
    CHECK(std::abs(r.c_star - grid) <= 1e-6 * grid);
  }
}

TEST_CASE("good-long partition") {
  const auto inst = SixWithOneBadEdge(5);
  const double c = OracleScale(inst).c_star;
  const auto part = GoodLongPartition(inst, c);
  CHECK(part.good_long.size() + part.complement.size() == inst.graph.num_edges());
  std::vector<std::size_t> degree(6, 0);
  for (std::size_t e = 0; e < inst.graph.num_edges(); ++e) {
    const auto& edge = inst.graph.edge(e);
    const double len = ((*inst.ground_truth)[edge.i] - (*inst.ground_truth)[edge.j]).norm();
    const bool long_good = edge.good() && len > 1.0 / c;
    const bool listed = std::find(part.good_long.begin(), part.good_long.end(), e) !=
                        part.good_long.end();
    CHECK(long_good == listed);
    if (!long_good) {
      ++degree[edge.i];
      ++degree[edge.j];
    }
  }
  CHECK(part.epsilon_0 == *std::max_element(degree.begin(), degree.end()) / 6.0);

  // Tiny scale makes every edge short; huge scale with no bad edges makes all long.
  const auto all_short = GoodLongPartition(inst, 1e-9);
  CHECK(all_short.good_long.empty());
  CHECK(all_short.epsilon_0 == 5.0 / 6.0);
  const auto clean = MakeCleanInstance(*inst.ground_truth, testing::CompleteEdges(6));
  const auto all_long = GoodLongPartition(clean, 1e9);
  CHECK(all_long.complement.empty());
  CHECK(all_long.epsilon_0 == 0.0);
}

}  // TEST_SUITE
