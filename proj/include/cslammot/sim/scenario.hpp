#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cslammot/geometry.hpp"
#include "cslammot/perception/grid.hpp"

namespace cslammot::sim {

/// Kinematic state under the constant turn rate and velocity model.
struct ObjectState {
  Pose2 pose;
  double v = 0.0;      ///< body-frame longitudinal speed, m/s
  double omega = 0.0;  ///< turn rate, rad/s
};

/// Piecewise-constant control applied from `start_step` until the next segment.
struct MotionSegment {
  int start_step = 0;
  double v = 0.0;
  double omega = 0.0;
};

struct TrackSpec {
  int id = 0;
  Pose2 initial;
  std::vector<MotionSegment> segments;
  double length = 4.5;
  double width = 1.8;
};

using VehicleTrack = TrackSpec;
using ObjectTrack = TrackSpec;

struct Segment2 {
  Eigen::Vector2d a;
  Eigen::Vector2d b;
};

/// Standard deviations along the longitudinal, lateral and yaw axes.
struct NoiseTriple {
  double longitudinal = 0.0;
  double lateral = 0.0;
  double yaw = 0.0;
};

struct SensorModel {
  double max_range = 50.0;
  double fov = 2.0 * 3.14159265358979323846;
  double detect_prob_visible = 0.95;
  double false_positive_rate = 0.2;
  NoiseTriple detection_noise{0.1, 0.1, 0.02};
  NoiseTriple odom_noise{0.02, 0.02, 0.002};

  bool valid() const;
};

/// Synthetic stand-ins for the learned place/keypoint front-ends.
struct FeatureModel {
  int descriptor_dim = 64;
  double descriptor_noise = 0.01;
  int keypoint_descriptor_dim = 32;
  double keypoint_position_noise = 0.05;
  double keypoint_descriptor_noise = 0.05;
  double landmark_range = 40.0;
};

struct Scenario {
  std::string name = "unnamed";
  int duration_steps = 100;
  double dt = 0.1;
  std::vector<VehicleTrack> vehicles;
  std::vector<ObjectTrack> objects;
  std::vector<Eigen::Vector2d> landmarks;
  std::vector<Segment2> occluders;
  std::uint64_t seed = 1;
  SensorModel sensor;
  FeatureModel features;
  perception::GridSpec grid = perception::GridSpec::centered(200, 200, 0.5);
  int keyframe_stride = 2;

  /// Throws std::invalid_argument when the scenario is malformed.
  void validate() const;
};

/// Appends the four edges of an oriented rectangle to `out`.
void addRectangle(std::vector<Segment2>& out, const Pose2& center, double length, double width);

/// Ground-truth trajectories, sampled at every step in [0, duration_steps).
struct WorldTruth {
  std::vector<std::vector<ObjectState>> vehicles;  ///< [vehicle][step]
  std::vector<std::vector<ObjectState>> objects;   ///< [object][step]
  double dt = 0.1;

  int steps() const;
};

WorldTruth generateTruth(const Scenario& scenario);

}  // namespace cslammot::sim
