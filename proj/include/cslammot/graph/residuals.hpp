#pragma once

#include <Eigen/Core>

#include "cslammot/geometry.hpp"
#include "cslammot/graph/types.hpp"
#include "cslammot/sim/sensors.hpp"

namespace cslammot::graph {

/// Residual coordinates of a relative pose: its (x, y, yaw) components.
inline Tangent3 localCoordinates(const Pose2& p) { return {p.x(), p.y(), p.yaw()}; }

Tangent3 residualOdometry(const Pose2& x_prev, const Pose2& x_cur, const Pose2& meas);
Tangent3 residualInterVehicle(const Pose2& x_e, const Pose2& x_en);
Tangent3 residualObjectPerception(const Pose2& x_e, const Pose2& o_i, const Pose2& z_in_vehicle);
Tangent3 residualMotion(const Pose2& o_prev, const Velocity2& v_prev, const Pose2& o_cur, double dt);
Eigen::Vector2d residualVelocity(const Velocity2& v_prev, const Velocity2& v_cur);

/// Re-expresses a detection taken at step k in the keyframe frame: z' = keyframe_to_current * z.
sim::Detection virtualizeDetection(const sim::Detection& z, const Pose2& keyframe_to_current);

/// CTRV pose prediction and its Jacobians w.r.t. the start pose and (v, omega).
struct CtrvLinearization {
  Pose2 predicted;
  Eigen::Matrix3d wrt_pose;
  Eigen::Matrix<double, 3, 2> wrt_velocity;
};
CtrvLinearization linearizeCtrv(const Pose2& pose, const Velocity2& velocity, double dt);

/// Derivative of sin(h)/h.
double sincDerivative(double h);

struct Linearized2 {
  Eigen::Vector3d error;
  Eigen::Matrix3d d_first;
  Eigen::Matrix3d d_second;
};

struct LinearizedMotion {
  Eigen::Vector3d error;
  Eigen::Matrix3d d_prev_pose;
  Eigen::Matrix<double, 3, 2> d_prev_velocity;
  Eigen::Matrix3d d_cur_pose;
};

Linearized2 linearizeOdometry(const Pose2& x_prev, const Pose2& x_cur, const Pose2& meas);
/// d_first is the Jacobian w.r.t. x_e; d_second is unused (zero).
Linearized2 linearizeInterVehicle(const Pose2& x_e, const Pose2& x_en);
/// d_first w.r.t. x_e, d_second w.r.t. o_i.
Linearized2 linearizeObjectPerception(const Pose2& x_e, const Pose2& o_i, const Pose2& z_in_vehicle);
LinearizedMotion linearizeMotion(const Pose2& o_prev, const Velocity2& v_prev, const Pose2& o_cur, double dt);
/// d/dx of between(prior, x) components.
Linearized2 linearizePosePrior(const Pose2& x, const Pose2& prior);

}  // namespace cslammot::graph
