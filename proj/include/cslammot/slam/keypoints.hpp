#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cslammot/geometry.hpp"
#include "cslammot/rng.hpp"
#include "cslammot/sim/scenario.hpp"

namespace cslammot::slam {

struct Keypoint {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  ///< vehicle frame, meters
  Eigen::VectorXd descriptor;
  int landmark = -1;  ///< planted correspondence, evaluation only
};

struct KeypointSet {
  std::vector<Keypoint> points;
  int frame = -1;
  int vehicle = -1;
};

struct KeypointParams {
  int descriptor_dim = 32;
  double position_noise = 0.05;
  double descriptor_noise = 0.05;
  double range = 40.0;
  double fov = 2.0 * 3.14159265358979323846;
};

/// Fixed unit-norm appearance descriptor per landmark.
std::vector<Eigen::VectorXd> landmarkDescriptors(std::size_t count, int dim, std::uint64_t seed);

/// One keypoint per visible landmark, with position and descriptor noise.
KeypointSet extractKeypoints(const Pose2& vehicle, std::span<const Eigen::Vector2d> landmarks,
                             std::span<const sim::Segment2> occluders,
                             std::span<const Eigen::VectorXd> landmark_descriptors, const KeypointParams& params,
                             int vehicle_id, int frame, Rng& rng);

struct IndexPair {
  int query = -1;
  int candidate = -1;
  bool operator==(const IndexPair&) const = default;
};

/// Mutual nearest neighbors in descriptor space that also pass Lowe's ratio test.
std::vector<IndexPair> matchKeypoints(const KeypointSet& query, const KeypointSet& candidate, double ratio = 0.8);

}  // namespace cslammot::slam
