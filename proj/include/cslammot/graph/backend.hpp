#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cslammot/graph/factor_graph.hpp"
#include "cslammot/graph/optimizer.hpp"
#include "cslammot/sim/sensors.hpp"

namespace cslammot::graph {

struct NoiseModel {
  /// Per keyframe-to-keyframe odometry.
  Eigen::Matrix3d odometry = Eigen::Vector3d(0.05 * 0.05, 0.05 * 0.05, 0.01 * 0.01).asDiagonal();
  /// Lower bound applied to the diagonal of the RANSAC covariance.
  Eigen::Vector3d inter_vehicle_floor{0.1 * 0.1, 0.1 * 0.1, 0.02 * 0.02};
  /// Detection covariance at confidence 1; scaled by 1/confidence.
  Eigen::Matrix3d perception = Eigen::Vector3d(0.3 * 0.3, 0.3 * 0.3, 0.1 * 0.1).asDiagonal();
  Eigen::Matrix3d motion = Eigen::Vector3d(0.2 * 0.2, 0.2 * 0.2, 0.05 * 0.05).asDiagonal();
  Eigen::Matrix2d velocity = Eigen::Vector2d(0.5 * 0.5, 0.1 * 0.1).asDiagonal();
  /// Prior on the first ego pose.
  Eigen::Matrix3d anchor = Eigen::Vector3d(1e-6, 1e-6, 1e-8).asDiagonal();
  /// Prior on a new track's velocity.
  Eigen::Matrix2d velocity_birth = Eigen::Vector2d(2.0 * 2.0, 0.5 * 0.5).asDiagonal();
};

struct TrackingParams {
  /// Squared Mahalanobis gate on position (chi-square 99%, 2 dof).
  double gate = 9.21;
  int birth_frames = 2;
  int death_frames = 5;
  /// Max distance between consecutive unmatched detections forming a tentative track.
  double birth_distance = 3.0;
  double outlier_weight = 0.1;
  double outlier_information_scale = 0.01;
};

struct BackendParams {
  double dt = 0.1;
  int keyframe_stride = 2;
  /// Steps kept in the optimization window.
  int horizon = 20;
  NoiseModel noise;
  TrackingParams tracking;
  OptimizerParams optimizer;
};

/// Indirect ego pose measurement for the current step.
struct InterVehicleMeasurement {
  int neighbor = -1;
  Pose2 x_en;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
};

struct TrackEstimate {
  int track = -1;
  Pose2 world;
  Pose2 in_ego;
  Velocity2 velocity;
  double length = 4.5;
  double width = 1.8;
  double confidence = 0.0;
};

struct BackendStep {
  int step = 0;
  bool keyframe = false;
  Pose2 ego;
  std::vector<TrackEstimate> tracks;
  int iterations = 0;
  double cost = 0.0;
  OptimizerStatus status = OptimizerStatus::kConverged;
  std::string diagnostics;
};

/// Sliding-window SLAMMOT estimator of one vehicle: keyframe ego poses, per-step object
/// poses and velocities, max-mixture association of detections to tracks.
class SlammotBackend {
 public:
  SlammotBackend(int vehicle, const BackendParams& params, const Pose2& anchor);

  /// Processes step k. `odometry` is the increment from k-1 (ignored at the first step);
  /// detections are in the vehicle frame at k.
  BackendStep step(int k, const Pose2& odometry, std::span<const sim::Detection> detections,
                   std::span<const InterVehicleMeasurement> inter_vehicle = {});

  bool isKeyframe(int k) const { return k % params_.keyframe_stride == 0; }
  /// Latest estimate of every keyframe pose: the last in-window value for marginalized ones.
  std::map<int, Pose2> keyframeEstimates() const;
  const FactorGraph& graph() const { return graph_; }
  const Values& values() const { return values_; }
  int activeTrackCount() const;

 private:
  struct Track {
    int id = -1;
    int last_stamp = -1;
    int misses = 0;
    bool active = true;
    double length = 4.5;
    double width = 1.8;
    double confidence = 0.0;
  };
  struct Tentative {
    Pose2 world;
    int stamp = -1;
    int count = 1;
    sim::Detection detection;
  };

  void addVariable(const VariableId& id, const Value& value);
  Pose2 currentEgo() const;
  void extendTracks(int k);
  void associate(int k, std::span<const sim::Detection> detections,
                 std::vector<std::pair<std::size_t, sim::Detection>>& mixture_factors);
  void updateLifecycle(int k, const std::vector<std::pair<std::size_t, sim::Detection>>& mixture_factors);
  void slide(int k);

  int vehicle_;
  BackendParams params_;
  FactorGraph graph_;
  Values values_;
  int last_keyframe_ = -1;
  Pose2 since_keyframe_;
  std::map<int, Track> tracks_;
  std::vector<Tentative> tentatives_;
  std::map<int, Pose2> finalized_;
  int next_track_ = 0;
};

}  // namespace cslammot::graph
