#include "cslammot/geometry.hpp"

#include <numbers>

namespace cslammot {

double normalizeAngle(double radians) {
  double wrapped = std::remainder(radians, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped = std::numbers::pi;
  return wrapped;
}

Eigen::Matrix2d Transform2::rotationMatrix() const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Transform2 Transform2::operator*(const Transform2& other) const {
  return Transform2(rotation + other.rotation, rotationMatrix() * other.translation + translation);
}

Transform2 Transform2::inverse() const {
  return Transform2(-rotation, -(rotationMatrix().transpose() * translation));
}

Eigen::Vector2d Pose2::transformFrom(const Eigen::Vector2d& p) const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  return {x_ + c * p.x() - s * p.y(), y_ + s * p.x() + c * p.y()};
}

Eigen::Vector2d Pose2::transformTo(const Eigen::Vector2d& p) const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  const double dx = p.x() - x_;
  const double dy = p.y() - y_;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Eigen::Matrix3d Pose2::matrix() const {
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  Eigen::Matrix3d m;
  m << c, -s, x_, s, c, y_, 0.0, 0.0, 1.0;
  return m;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const Eigen::Vector2d t = a.transformFrom(b.translation());
  return {t.x(), t.y(), a.yaw() + b.yaw()};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.yaw());
  const double s = std::sin(a.yaw());
  return {-c * a.x() - s * a.y(), s * a.x() - c * a.y(), -a.yaw()};
}

Pose2 between(const Pose2& a, const Pose2& b) {
  const Eigen::Vector2d t = a.transformTo(b.translation());
  return {t.x(), t.y(), b.yaw() - a.yaw()};
}

Pose2 boxplus(const Pose2& p, const Tangent3& d) {
  return {p.x() + d.dx, p.y() + d.dy, p.yaw() + d.dyaw};
}

Tangent3 boxminus(const Pose2& b, const Pose2& a) {
  return {b.x() - a.x(), b.y() - a.y(), normalizeAngle(b.yaw() - a.yaw())};
}

Eigen::Matrix4d embedSe3(const Transform2& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<2, 2>() = t.rotationMatrix();
  m(0, 3) = t.translation.x();
  m(1, 3) = t.translation.y();
  return m;
}

Transform2 projectSe2(const Eigen::Matrix4d& m) {
  return Transform2(std::atan2(m(1, 0), m(0, 0)), Eigen::Vector2d(m(0, 3), m(1, 3)));
}

ComposeJacobians composeJacobians(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.yaw());
  const double s = std::sin(a.yaw());
  // d(R_a t_b)/d(yaw_a) = perp(R_a t_b)
  const double rx = c * b.x() - s * b.y();
  const double ry = s * b.x() + c * b.y();
  ComposeJacobians j;
  j.wrtA << 1.0, 0.0, -ry,
            0.0, 1.0, rx,
            0.0, 0.0, 1.0;
  j.wrtB << c, -s, 0.0,
            s, c, 0.0,
            0.0, 0.0, 1.0;
  return j;
}

BetweenJacobians betweenJacobians(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.yaw());
  const double s = std::sin(a.yaw());
  const double dx = b.x() - a.x();
  const double dy = b.y() - a.y();
  const double tx = c * dx + s * dy;
  const double ty = -s * dx + c * dy;
  BetweenJacobians j;
  j.wrtA << -c, -s, ty,
            s, -c, -tx,
            0.0, 0.0, -1.0;
  j.wrtB << c, s, 0.0,
            -s, c, 0.0,
            0.0, 0.0, 1.0;
  return j;
}

bool approxEqual(const Pose2& a, const Pose2& b, double tol) {
  return std::abs(a.x() - b.x()) <= tol && std::abs(a.y() - b.y()) <= tol &&
         std::abs(normalizeAngle(a.yaw() - b.yaw())) <= tol;
}

}  // namespace cslammot
