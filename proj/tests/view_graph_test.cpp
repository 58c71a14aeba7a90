#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ludrec/error.hpp"
#include "ludrec/view_graph.hpp"
#include "support.hpp"

using namespace ludrec;

TEST_SUITE("view-graph") {

TEST_CASE("edges are stored canonically") {
  ViewGraph g(3);
  g.AddEdge(2, 0, UnitVector3::Normalize({1, 0, 0}));
  REQUIRE(g.num_edges() == 1);
  CHECK(g.edge(0).i == 0);
  CHECK(g.edge(0).j == 2);
  CHECK(g.edge(0).direction.x() == -1.0);
  CHECK(g.Direction(2, 0).x() == 1.0);
  CHECK(g.Direction(0, 2).x() == -1.0);
  CHECK(g.FindEdge(2, 0) == std::optional<std::size_t>(0));
  CHECK(!g.FindEdge(1, 2));
  CHECK_THROWS_AS(g.AddEdge(0, 2, UnitVector3()), Error);
  CHECK_THROWS_AS(g.AddEdge(1, 1, UnitVector3()), Error);
  CHECK_THROWS_AS(g.AddEdge(1, 3, UnitVector3()), Error);
  CHECK(!g.IsConnected());
  g.AddEdge(1, 2, UnitVector3());
  CHECK(g.IsConnected());
}

TEST_CASE("sample locations") {
  Rng a = MakeStream(3, Stream::kLocations), b = MakeStream(3, Stream::kLocations);
  const auto x = SampleLocations(2, a), y = SampleLocations(2, b);
  CHECK(x[0] == y[0]);
  CHECK(x[1] == y[1]);
  CHECK_THROWS_AS(SampleLocations(1, a), Error);

  Rng rng(99);
  const auto big = SampleLocations(10000, rng);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0, sq = 0.0;
    for (const auto& p : big) mean += p[c];
    mean /= 10000.0;
    for (const auto& p : big) sq += (p[c] - mean) * (p[c] - mean);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(sq / 9999.0 - 1.0) < 0.05);
  }
}

TEST_CASE("sample graph") {
  Rng rng(1);
  CHECK(SampleGraph(4, 1.0, rng).size() == 6);

  const auto edges = SampleGraph(200, 0.5, rng);
  const double mean = 0.5 * 19900, sd = std::sqrt(19900 * 0.25);
  CHECK(std::abs(static_cast<double>(edges.size()) - mean) <= 4 * sd);
  for (std::size_t k = 1; k < edges.size(); ++k) CHECK(edges[k - 1] < edges[k]);

  Rng r1(5), r2(5);
  CHECK(SampleGraph(10, 1e-9, r1) == SampleGraph(10, 1e-9, r2));
  CHECK_THROWS_AS(SampleGraph(10, 0.0, rng), Error);
  CHECK_THROWS_AS(SampleGraph(10, 1.5, rng), Error);
}

TEST_CASE("corrupt by edge fraction") {
  Rng rng(2);
  const auto locs = testing::RandomLocations(4, rng);
  const auto clean = MakeCleanInstance(locs, testing::CompleteEdges(4));

  const auto same = Corrupt(clean, EdgeFraction{0.0}, rng);
  CHECK(same.graph.CountBad() == 0);
  for (std::size_t e = 0; e < 6; ++e) {
    CHECK(same.graph.edge(e).direction.vec() == clean.graph.edge(e).direction.vec());
  }

  const auto all = Corrupt(clean, EdgeFraction{1.0}, rng);
  CHECK(all.graph.CountBad() == 6);
  for (const auto& e : all.graph.edges()) CHECK(std::abs(e.direction.vec().norm() - 1.0) < 1e-12);
}

TEST_CASE("corrupt by max degree on a star") {
  const std::size_t n = 8;
  Rng rng(4);
  const auto locs = testing::RandomLocations(n, rng);
  std::vector<std::pair<std::size_t, std::size_t>> star;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != 1) star.emplace_back(std::min<std::size_t>(1, k), std::max<std::size_t>(1, k));
  }
  const auto clean = MakeCleanInstance(locs, star);
  for (int seed = 0; seed < 50; ++seed) {
    Rng r(seed);
    const auto inst = Corrupt(clean, MaxDegreeBound{2.0 / n}, r);
    CHECK(inst.graph.CountBad() == 2);
    CHECK(EpsilonB(inst.graph) <= 2.0 / n + 1e-12);
  }
  // A cap of zero edges per vertex admits nothing.
  Rng r(0);
  CHECK_THROWS_AS(Corrupt(clean, MaxDegreeBound{0.5 / n}, r), Error);
  CHECK(Corrupt(clean, MaxDegreeBound{0.0}, r).graph.CountBad() == 0);
}

TEST_CASE("custom corrupted-direction sampler") {
  Rng rng(6);
  const auto clean = MakeCleanInstance(testing::RandomLocations(5, rng), testing::CompleteEdges(5));
  const auto inst = Corrupt(clean, EdgeFraction{1.0}, rng,
                            [](const Edge&, Rng&) { return UnitVector3::Normalize({0, 0, 1}); });
  for (const auto& e : inst.graph.edges()) CHECK(e.direction.z() == 1.0);
}

TEST_CASE("add noise") {
  Rng rng(8);
  const auto clean = MakeCleanInstance(testing::RandomLocations(5, rng), testing::CompleteEdges(5));
  const auto same = AddNoise(clean, 0.0, rng);
  for (std::size_t e = 0; e < clean.graph.num_edges(); ++e) {
    CHECK(same.graph.edge(e).direction.vec() == clean.graph.edge(e).direction.vec());
  }
  CHECK_THROWS_AS(AddNoise(clean, -0.1, rng), Error);
}

TEST_CASE("add noise resamples a cancelling draw") {
  const LocationSet locs({{1, 0, 0}, {0, 0, 0}});
  const auto clean = MakeCleanInstance(locs, testing::EdgeList{{0, 1}});
  int calls = 0;
  Rng rng(0);
  const auto noisy = AddNoise(clean, 1.0, rng, [&](Rng&) {
    ++calls;
    return calls == 1 ? UnitVector3::Normalize({-1, 0, 0}) : UnitVector3::Normalize({0, 1, 0});
  });
  CHECK(calls == 2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((noisy.graph.edge(0).direction.vec() - Point3(r, r, 0)).norm() < 1e-15);
}

TEST_CASE("noise level sets the mean angular deviation") {
  HlvParams params;
  params.n = 50;
  params.p = 0.5;
  params.noise_sigma = 0.1;
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    params.seed = seed;
    const auto inst = GenerateInstance(params);
    for (const auto& e : inst.graph.edges()) {
      const Point3 truth = PairwiseDirection((*inst.ground_truth)[e.i], (*inst.ground_truth)[e.j]);
      total += std::acos(std::clamp(truth.dot(e.direction.vec()), -1.0, 1.0));
      ++count;
    }
  }
  const double mean_deg = total / count * 180.0 / std::numbers::pi;
  CHECK(mean_deg > 0.0);
  CHECK(mean_deg < 12.0);
}

TEST_CASE("epsilon_b") {
  ViewGraph g(4);
  g.AddEdge(0, 1, UnitVector3(), EdgeLabel::kBad);
  g.AddEdge(0, 2, UnitVector3(), EdgeLabel::kBad);
  g.AddEdge(2, 3, UnitVector3());
  CHECK(EpsilonB(g) == 0.5);
  ViewGraph h(4);
  h.AddEdge(0, 1, UnitVector3(), EdgeLabel::kBad);
  h.AddEdge(2, 3, UnitVector3(), EdgeLabel::kBad);
  CHECK(EpsilonB(h) == 0.25);
  CHECK(EpsilonB(ViewGraph(4)) == 0.0);
}

TEST_CASE("uniform sphere") {
  Rng a(12), b(12);
  CHECK(UniformSphere(a).vec() == UniformSphere(b).vec());
  Rng rng(13);
  Point3 mean = Point3::Zero();
  for (int k = 0; k < 100000; ++k) {
    const auto u = UniformSphere(rng);
    CHECK(std::abs(u.vec().norm() - 1.0) <= 1e-12);
    mean += u.vec();
  }
  mean /= 100000.0;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("hlv parameter validation") {
  HlvParams params;
  params.p = 0.0;
  CHECK_THROWS_AS(params.Validate(), Error);
  params = {};
  params.noise_sigma = 1.5;
  CHECK_THROWS_AS(params.Validate(), Error);
  params = {};
  params.corruption = MaxDegreeBound{-0.1};
  CHECK_THROWS_AS(params.Validate(), Error);
  params = {};
  params.n = 1;
  CHECK_THROWS_AS(params.Validate(), Error);
}

TEST_CASE("stream separation keeps the graph fixed across noise levels") {
  HlvParams a;
  a.n = 20;
  a.seed = 77;
  HlvParams b = a;
  b.noise_sigma = 0.3;
  b.corruption = EdgeFraction{0.2};
  const auto x = GenerateInstance(a), y = GenerateInstance(b);
  REQUIRE(x.graph.num_edges() == y.graph.num_edges());
  for (std::size_t e = 0; e < x.graph.num_edges(); ++e) {
    CHECK(x.graph.edge(e).i == y.graph.edge(e).i);
    CHECK(x.graph.edge(e).j == y.graph.edge(e).j);
  }
  for (std::size_t i = 0; i < 20; ++i) CHECK((*x.ground_truth)[i] == (*y.ground_truth)[i]);
}

}  // TEST_SUITE
