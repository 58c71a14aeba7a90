#include "ludrec/geometry.hpp"

#include <cmath>
#include <string>

#include "ludrec/error.hpp"

namespace ludrec {

const char* ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kCoincidentPoints: return "coincident-points";
    case ErrorKind::kDegenerateDirection: return "degenerate-direction";
    case ErrorKind::kInfeasibleBound: return "infeasible-bound";
    case ErrorKind::kDisconnectedGraph: return "disconnected-graph";
    case ErrorKind::kSizeLimit: return "size-limit";
    case ErrorKind::kEmptyEdgeSet: return "empty-edge-set";
    case ErrorKind::kDegenerateScale: return "degenerate-scale";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

UnitVector3 UnitVector3::Normalize(const Point3& v) {
  const double norm = v.norm();
  if (!(norm > kCoincidentTolerance) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kDegenerateDirection,
                "cannot normalize a zero or non-finite vector");
  }
  return UnitVector3(v / norm);
}

UnitVector3 UnitVector3::FromUnit(const Point3& v) {
  const double norm = v.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12) {
    throw Error(ErrorKind::kDegenerateDirection,
                "direction is not unit length (norm " + std::to_string(norm) +
                    ")");
  }
  return UnitVector3(v);
}

LocationSet::LocationSet(std::vector<Point3> points)
    : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw Error(ErrorKind::kPrecondition,
                "a location set needs at least two points");
  }
  for (const auto& p : points_) {
    if (!p.allFinite()) {
      throw Error(ErrorKind::kPrecondition, "location has a non-finite coordinate");
    }
  }
}

Point3 LocationSet::Mean() const {
  Point3 sum = Point3::Zero();
  for (const auto& p : points_) sum += p;
  return points_.empty() ? sum : Point3(sum / static_cast<double>(points_.size()));
}

void LocationSet::RequireDistinct() const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      if ((points_[i] - points_[j]).norm() < kCoincidentTolerance) {
        throw Error(ErrorKind::kCoincidentPoints,
                    "locations " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide");
      }
    }
  }
}

UnitVector3 PairwiseDirection(const Point3& a, const Point3& b) {
  const Point3 d = a - b;
  if (d.norm() < kCoincidentTolerance) {
    throw Error(ErrorKind::kCoincidentPoints,
                "pairwise direction of coincident points is undefined");
  }
  return UnitVector3::Normalize(d);
}

Point3 ProjectPerp(const UnitVector3& gamma, const Point3& v) {
  const Point3& g = gamma.vec();
  return v - v.dot(g) * g;
}

LocationSet Center(const LocationSet& locs) {
  const Point3 mean = locs.Mean();
  std::vector<Point3> out(locs.begin(), locs.end());
  for (auto& p : out) p -= mean;
  return LocationSet(std::move(out));
}

NrmseResult Nrmse(const LocationSet& est, const LocationSet& gt) {
  if (est.size() != gt.size()) {
    throw Error(ErrorKind::kPrecondition, "nrmse: size mismatch");
  }
  const LocationSet e = Center(est);
  const LocationSet g = Center(gt);
  double cross = 0.0;
  double est_sq = 0.0;
  double gt_sq = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    cross += e[i].dot(g[i]);
    est_sq += e[i].squaredNorm();
    gt_sq += g[i].squaredNorm();
  }
  if (!(gt_sq > 0.0)) {
    throw Error(ErrorKind::kPrecondition, "nrmse: ground truth is degenerate");
  }
  NrmseResult result;
  if (!(est_sq > 0.0)) {
    result.degenerate = true;
    return result;
  }
  result.kappa = cross / est_sq;
  double err = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    err += (result.kappa * e[i] - g[i]).squaredNorm();
  }
  result.value = std::sqrt(std::max(0.0, err) / gt_sq);
  return result;
}

}  // namespace ludrec
