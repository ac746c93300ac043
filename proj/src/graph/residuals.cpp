#include "cslammot/graph/residuals.hpp"

#include <cmath>

namespace cslammot::graph {

Tangent3 residualOdometry(const Pose2& x_prev, const Pose2& x_cur, const Pose2& meas) {
  return localCoordinates(between(compose(x_prev, meas), x_cur));
}

Tangent3 residualInterVehicle(const Pose2& x_e, const Pose2& x_en) { return localCoordinates(between(x_en, x_e)); }

Tangent3 residualObjectPerception(const Pose2& x_e, const Pose2& o_i, const Pose2& z_in_vehicle) {
  return localCoordinates(between(compose(x_e, z_in_vehicle), o_i));
}

Tangent3 residualMotion(const Pose2& o_prev, const Velocity2& v_prev, const Pose2& o_cur, double dt) {
  const sim::ObjectState predicted = sim::stepCtrv({o_prev, v_prev.v, v_prev.omega}, dt);
  return localCoordinates(between(predicted.pose, o_cur));
}

Eigen::Vector2d residualVelocity(const Velocity2& v_prev, const Velocity2& v_cur) {
  return {v_cur.v - v_prev.v, v_cur.omega - v_prev.omega};
}

sim::Detection virtualizeDetection(const sim::Detection& z, const Pose2& keyframe_to_current) {
  sim::Detection out = z;
  out.pose_in_vehicle = compose(keyframe_to_current, z.pose_in_vehicle);
  return out;
}

double sincDerivative(double h) {
  if (std::abs(h) < 1e-3) return -h / 3.0 + h * h * h / 30.0;
  return (h * std::cos(h) - std::sin(h)) / (h * h);
}

CtrvLinearization linearizeCtrv(const Pose2& pose, const Velocity2& velocity, double dt) {
  CtrvLinearization out;
  out.predicted = sim::stepCtrv({pose, velocity.v, velocity.omega}, dt).pose;

  const double h = 0.5 * velocity.omega * dt;
  const double s = std::abs(h) < 1e-4 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
  const double chord = velocity.v * dt * s;
  const double heading = pose.yaw() + h;
  const double c = std::cos(heading);
  const double sn = std::sin(heading);

  out.wrt_pose << 1.0, 0.0, -chord * sn,
                  0.0, 1.0, chord * c,
                  0.0, 0.0, 1.0;

  const double dchord = velocity.v * dt * sincDerivative(h) * 0.5 * dt;
  out.wrt_velocity << dt * s * c, dchord * c - chord * sn * 0.5 * dt,
                      dt * s * sn, dchord * sn + chord * c * 0.5 * dt,
                      0.0, dt;
  return out;
}

Linearized2 linearizeOdometry(const Pose2& x_prev, const Pose2& x_cur, const Pose2& meas) {
  const Pose2 predicted = compose(x_prev, meas);
  const auto jc = composeJacobians(x_prev, meas);
  const auto jb = betweenJacobians(predicted, x_cur);
  return {localCoordinates(between(predicted, x_cur)).vector(), jb.wrtA * jc.wrtA, jb.wrtB};
}

Linearized2 linearizeInterVehicle(const Pose2& x_e, const Pose2& x_en) {
  const auto jb = betweenJacobians(x_en, x_e);
  return {localCoordinates(between(x_en, x_e)).vector(), jb.wrtB, Eigen::Matrix3d::Zero()};
}

Linearized2 linearizeObjectPerception(const Pose2& x_e, const Pose2& o_i, const Pose2& z_in_vehicle) {
  const Pose2 predicted = compose(x_e, z_in_vehicle);
  const auto jc = composeJacobians(x_e, z_in_vehicle);
  const auto jb = betweenJacobians(predicted, o_i);
  return {localCoordinates(between(predicted, o_i)).vector(), jb.wrtA * jc.wrtA, jb.wrtB};
}

LinearizedMotion linearizeMotion(const Pose2& o_prev, const Velocity2& v_prev, const Pose2& o_cur, double dt) {
  const CtrvLinearization ctrv = linearizeCtrv(o_prev, v_prev, dt);
  const auto jb = betweenJacobians(ctrv.predicted, o_cur);
  LinearizedMotion out;
  out.error = localCoordinates(between(ctrv.predicted, o_cur)).vector();
  out.d_prev_pose = jb.wrtA * ctrv.wrt_pose;
  out.d_prev_velocity = jb.wrtA * ctrv.wrt_velocity;
  out.d_cur_pose = jb.wrtB;
  return out;
}

Linearized2 linearizePosePrior(const Pose2& x, const Pose2& prior) {
  const auto jb = betweenJacobians(prior, x);
  return {localCoordinates(between(prior, x)).vector(), jb.wrtB, Eigen::Matrix3d::Zero()};
}

}  // namespace cslammot::graph
