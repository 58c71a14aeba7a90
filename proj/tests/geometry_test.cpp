#include <doctest.h>

#include <cmath>

#include "ludrec/error.hpp"
#include "ludrec/geometry.hpp"
#include "support.hpp"

using namespace ludrec;

namespace {

bool Near(const Point3& a, const Point3& b, double tol) { return (a - b).norm() <= tol; }

ErrorKind KindOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kPrecondition;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("pairwise direction") {
  CHECK(Near(PairwiseDirection({1, 0, 0}, {0, 0, 0}), {1, 0, 0}, 1e-15));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(Near(PairwiseDirection({1, 1, 0}, {0, 0, 0}), {r, r, 0}, 1e-15));
  CHECK(KindOf([] { PairwiseDirection({0, 0, 0}, {0, 0, 0}); }) == ErrorKind::kCoincidentPoints);
  CHECK(KindOf([] { PairwiseDirection({1, 2, 3}, {1, 2, 3 + 1e-15}); }) ==
        ErrorKind::kCoincidentPoints);
}

TEST_CASE("unit vector construction") {
  CHECK(KindOf([] { UnitVector3::Normalize(Point3::Zero()); }) ==
        ErrorKind::kDegenerateDirection);
  CHECK(KindOf([] { UnitVector3::FromUnit({1.1, 0, 0}); }) == ErrorKind::kDegenerateDirection);
  CHECK(UnitVector3::Normalize({0, 3, 4}).vec().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Near((-UnitVector3::Normalize({0, 0, 2})).vec(), {0, 0, -1}, 0.0));
}

TEST_CASE("project perp") {
  CHECK(Near(ProjectPerp(UnitVector3::Normalize({1, 0, 0}), {3, 4, 0}), {0, 4, 0}, 1e-15));
  CHECK(Near(ProjectPerp(UnitVector3::Normalize({0, 1, 0}), {0, 5, 0}), {0, 0, 0}, 1e-15));
  CHECK(Near(ProjectPerp(UnitVector3::Normalize({1, 1, 0}), {1, 0, 0}), {0.5, -0.5, 0}, 1e-15));
}

TEST_CASE("center") {
  const auto a = Center(LocationSet({{1, 0, 0}, {3, 0, 0}}));
  CHECK(Near(a[0], {-1, 0, 0}, 1e-15));
  CHECK(Near(a[1], {1, 0, 0}, 1e-15));
  const auto b = Center(LocationSet({{0, 0, 0}, {0, 2, 0}, {0, 4, 0}}));
  CHECK(Near(b[0], {0, -2, 0}, 1e-15));
  CHECK(Near(b[1], {0, 0, 0}, 1e-15));
  CHECK(Near(b[2], {0, 2, 0}, 1e-15));
  const auto c = Center(b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(Near(c[i], b[i], 1e-15));
}

TEST_CASE("location set preconditions") {
  CHECK(KindOf([] { LocationSet({{0, 0, 0}}); }) == ErrorKind::kPrecondition);
  CHECK(KindOf([] { LocationSet({{0, 0, 0}, {NAN, 0, 0}}); }) == ErrorKind::kPrecondition);
  CHECK(KindOf([] { LocationSet({{0, 0, 0}, {0, 0, 0}}).RequireDistinct(); }) ==
        ErrorKind::kCoincidentPoints);
}

TEST_CASE("nrmse examples") {
  const LocationSet gt({{1, 0, 0}, {0, 2, 0}, {-1, -1, 1}});
  std::vector<Point3> doubled;
  for (const auto& p : gt) doubled.push_back(2.0 * p);
  const auto scaled = Nrmse(LocationSet(doubled), gt);
  CHECK(scaled.value <= 1e-15);
  CHECK(scaled.kappa == doctest::Approx(0.5).epsilon(1e-15));

  const auto same = Nrmse(gt, gt);
  CHECK(same.value <= 1e-15);
  CHECK(same.kappa == doctest::Approx(1.0).epsilon(1e-15));

  // Translation of the estimate is ignored.
  std::vector<Point3> shifted;
  for (const auto& p : gt) shifted.push_back(p + Point3(5, -3, 2));
  CHECK(Nrmse(LocationSet(shifted), gt).value <= 1e-14);
}

TEST_CASE("nrmse of an orthogonal estimate is one") {
  const LocationSet gt({{1, 0, 0}, {-1, 0, 0}});
  const LocationSet est({{0, 1, 0}, {0, -1, 0}});
  const auto r = Nrmse(est, gt);
  CHECK(r.kappa == 0.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));

  // Grid search over kappa never does better than the closed form.
  double best = 1e300;
  for (int k = -2000; k <= 2000; ++k) {
    const double kappa = k * 1e-3;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      num += (kappa * est[i] - gt[i]).squaredNorm();
      den += gt[i].squaredNorm();
    }
    best = std::min(best, std::sqrt(num / den));
  }
  CHECK(best == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("nrmse degenerate and mismatched inputs") {
  const LocationSet gt({{1, 0, 0}, {-1, 0, 0}});
  const auto r = Nrmse(LocationSet({{2, 2, 2}, {2, 2, 2}}), gt);
  CHECK(r.degenerate);
  CHECK(r.value == 1.0);
  CHECK(KindOf([&] { Nrmse(LocationSet({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}), gt); }) ==
        ErrorKind::kPrecondition);
  CHECK(KindOf([&] { Nrmse(gt, LocationSet({{3, 3, 3}, {3, 3, 3}})); }) ==
        ErrorKind::kPrecondition);
}

TEST_CASE("nrmse matches a grid search over kappa") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = Center(testing::RandomLocations(6, rng));
    const auto est = Center(testing::RandomLocations(6, rng));
    const auto r = Nrmse(est, gt);
    double gt2 = 0.0;
    for (const auto& p : gt) gt2 += p.squaredNorm();
    double best = 1e300;
    for (int k = -20000; k <= 20000; ++k) {
      const double kappa = r.kappa + k * 1e-5;
      double num = 0.0;
      for (std::size_t i = 0; i < 6; ++i) num += (kappa * est[i] - gt[i]).squaredNorm();
      best = std::min(best, std::sqrt(num / gt2));
    }
    CHECK(r.value <= best + 1e-12);
    CHECK(r.value >= best - 1e-6);
  }
}

}  // TEST_SUITE
