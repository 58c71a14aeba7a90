#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace ludrec {

using Point3 = Eigen::Vector3d;

/// Threshold below which two points are treated as the same location.
inline constexpr double kCoincidentTolerance = 1e-14;

/// A direction in 3-space. Construction normalizes or validates, so every
/// live instance has unit norm within 1e-12.
class UnitVector3 {
 public:
  UnitVector3() : v_(1.0, 0.0, 0.0) {}

  /// Normalizes `v`; throws kDegenerateDirection when `v` is (numerically)
  /// the zero vector.
  static UnitVector3 Normalize(const Point3& v);

  /// Wraps a vector that the caller asserts is already unit length. The norm
  /// is checked against 1e-12; the value is kept bit-for-bit so serialized
  /// directions round-trip exactly.
  static UnitVector3 FromUnit(const Point3& v);

  const Point3& vec() const { return v_; }
  operator const Point3&() const { return v_; }  // NOLINT

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  UnitVector3 operator-() const { return UnitVector3(-v_); }

 private:
  explicit UnitVector3(const Point3& v) : v_(v) {}
  Point3 v_;
};

/// Ordered set of n >= 2 points (ground truth or estimated locations).
class LocationSet {
 public:
  LocationSet() = default;
  explicit LocationSet(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  Point3& operator[](std::size_t i) { return points_[i]; }

  std::span<const Point3> points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  Point3 Mean() const;

  /// Throws kCoincidentPoints if two points are closer than
  /// kCoincidentTolerance.
  void RequireDistinct() const;

 private:
  std::vector<Point3> points_;
};

/// (a - b) / |a - b|.
UnitVector3 PairwiseDirection(const Point3& a, const Point3& b);

/// Projection of v onto the orthogonal complement of gamma.
Point3 ProjectPerp(const UnitVector3& gamma, const Point3& v);

/// Translates the set so its mean is the origin.
LocationSet Center(const LocationSet& locs);

struct NrmseResult {
  double value = 1.0;
  /// Least-squares scale applied to the (centered) estimate.
  double kappa = 0.0;
  /// Set when the centered estimate is identically zero; value is then 1.
  bool degenerate = false;
};

/// Scale-aligned normalized RMS error between an estimate and the ground
/// truth. Both sets are centered first; kappa is the vertex-wise
/// least-squares scale sum<est_i, gt_i> / sum |est_i|^2.
NrmseResult Nrmse(const LocationSet& est, const LocationSet& gt);

}  // namespace ludrec
