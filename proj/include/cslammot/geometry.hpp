#pragma once

#include <cmath>

#include <Eigen/Core>

namespace cslammot {

/// Wraps an angle into (-pi, pi].
double normalizeAngle(double radians);

/// Local tangent increment used by the solver retraction.
struct Tangent3 {
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;

  Eigen::Vector3d vector() const { return {dx, dy, dyaw}; }
  static Tangent3 fromVector(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
  static Tangent3 zero() { return {}; }
};

/// Planar rigid transform acting on points: p' = R(rotation) p + translation.
struct Transform2 {
  double rotation = 0.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Transform2() = default;
  Transform2(double rot, const Eigen::Vector2d& trans)
      : rotation(normalizeAngle(rot)), translation(trans) {}

  static Transform2 identity() { return {}; }

  Eigen::Matrix2d rotationMatrix() const;
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    return rotationMatrix() * p + translation;
  }
  Transform2 operator*(const Transform2& other) const;
  Transform2 inverse() const;
};

/// SE(2) element. Yaw is kept in (-pi, pi] by every constructor and operation.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double yaw) : x_(x), y_(y), yaw_(normalizeAngle(yaw)) {}
  explicit Pose2(const Transform2& t)
      : Pose2(t.translation.x(), t.translation.y(), t.rotation) {}

  static Pose2 identity() { return {}; }
  static Pose2 fromVector(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Eigen::Vector2d translation() const { return {x_, y_}; }
  Eigen::Vector3d vector() const { return {x_, y_, yaw_}; }
  Transform2 transform() const { return Transform2(yaw_, translation()); }

  /// Maps a point from this frame into the parent frame.
  Eigen::Vector2d transformFrom(const Eigen::Vector2d& p) const;
  /// Maps a parent-frame point into this frame.
  Eigen::Vector2d transformTo(const Eigen::Vector2d& p) const;

  Eigen::Matrix3d matrix() const;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);
/// inverse(a) * b
Pose2 between(const Pose2& a, const Pose2& b);
/// Additive retraction: (x + dx, y + dy, wrap(yaw + dyaw)).
Pose2 boxplus(const Pose2& p, const Tangent3& d);
/// Inverse of boxplus: returns d with boxplus(a, d) == b (yaw difference wrapped).
Tangent3 boxminus(const Pose2& b, const Pose2& a);

inline Pose2 operator*(const Pose2& a, const Pose2& b) { return compose(a, b); }

/// Zero-padded SE(3) embedding of a planar transform (z = 0, roll = pitch = 0).
Eigen::Matrix4d embedSe3(const Transform2& t);
/// Projects a homogeneous 4x4 transform onto the plane (drops z, roll and pitch).
Transform2 projectSe2(const Eigen::Matrix4d& m);

/// Jacobians of compose(a, b) with respect to a and b under the additive parameterization.
struct ComposeJacobians {
  Eigen::Matrix3d wrtA;
  Eigen::Matrix3d wrtB;
};
ComposeJacobians composeJacobians(const Pose2& a, const Pose2& b);

/// Jacobians of between(a, b) with respect to a and b.
struct BetweenJacobians {
  Eigen::Matrix3d wrtA;
  Eigen::Matrix3d wrtB;
};
BetweenJacobians betweenJacobians(const Pose2& a, const Pose2& b);

bool approxEqual(const Pose2& a, const Pose2& b, double tol);

}  // namespace cslammot
