#include "cslammot/slam/indirect_pose.hpp"

namespace cslammot::slam {

IndirectPose indirectPose(const Transform2& delta_t, const Pose2& x_n_k, const Pose2& x_e_map) {
  IndirectPose out;
  const Transform2 neighbor_in_ego_map = delta_t * x_e_map.transform();
  out.t_en = neighbor_in_ego_map * x_n_k.transform().inverse();
  out.neighbor_in_ego_map = Pose2(out.t_en * x_n_k.transform());
  out.x_en = indirectEgoPose(delta_t, out.t_en, x_n_k);
  return out;
}

Pose2 indirectEgoPose(const Transform2& delta_t, const Transform2& t_en, const Pose2& x_n_k) {
  return Pose2(delta_t.inverse() * (t_en * x_n_k.transform()));
}

Transform2 mapFrameDelta(const Pose2& neighbor_in_map, const Transform2& ego_in_neighbor) {
  const Transform2 xn = neighbor_in_map.transform();
  return xn * ego_in_neighbor.inverse() * xn.inverse();
}

Eigen::Matrix3d indirectCovariance(const Pose2& neighbor_in_map, const Eigen::Matrix3d& neighbor_cov,
                                   const Pose2& ego_in_neighbor, const Eigen::Matrix3d& relative_cov) {
  const ComposeJacobians j = composeJacobians(neighbor_in_map, ego_in_neighbor);
  Eigen::Matrix3d cov = j.wrtA * neighbor_cov * j.wrtA.transpose() + j.wrtB * relative_cov * j.wrtB.transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace cslammot::slam
