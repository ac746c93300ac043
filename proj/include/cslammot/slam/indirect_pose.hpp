#pragma once

#include <Eigen/Core>

#include "cslammot/geometry.hpp"

namespace cslammot::slam {

struct IndirectPose {
  Transform2 t_en;             ///< neighbor map -> ego map alignment
  Pose2 neighbor_in_ego_map;   ///< neighbor pose expressed in the ego map
  Pose2 x_en;                  ///< indirect ego pose
};

/// Full two-stage construction: neighbor pose in the ego map from delta_t and the
/// ego's map pose, the map alignment from that and the neighbor's own map pose,
/// then the indirect ego pose from the alignment.
IndirectPose indirectPose(const Transform2& delta_t, const Pose2& x_n_k, const Pose2& x_e_map);

/// Indirect ego pose from a known map alignment: delta_t^-1 * (t_en * x_n_k).
Pose2 indirectEgoPose(const Transform2& delta_t, const Transform2& t_en, const Pose2& x_n_k);

/// Map-frame delta_t for a measured body-frame relation `ego_in_neighbor`
/// (ego pose in the neighbor's sensor frame) and the neighbor's map pose:
/// X_N * ego_in_neighbor^-1 * X_N^-1, so that delta_t^-1 * X_N = X_N * ego_in_neighbor.
Transform2 mapFrameDelta(const Pose2& neighbor_in_map, const Transform2& ego_in_neighbor);

/// First-order covariance of X_N * ego_in_neighbor given both input covariances.
Eigen::Matrix3d indirectCovariance(const Pose2& neighbor_in_map, const Eigen::Matrix3d& neighbor_cov,
                                   const Pose2& ego_in_neighbor, const Eigen::Matrix3d& relative_cov);

}  // namespace cslammot::slam
