#pragma once

#include <span>
#include <vector>

#include "cslammot/perception/grid.hpp"
#include "cslammot/rng.hpp"
#include "cslammot/sim/scenario.hpp"

namespace cslammot::sim {

/// Object detection in the observing vehicle's frame.
struct Detection {
  Pose2 pose_in_vehicle;
  double length = 4.5;
  double width = 1.8;
  double confidence = 1.0;
  int stamp = 0;
  int source_vehicle = -1;
  /// Ground-truth object id, -1 for false positives. Evaluation only; never transmitted.
  int truth_id = -1;
};

/// Turn rates below this use the straight-line limit.
inline constexpr double kCtrvStraightThreshold = 1e-6;

/// Closed-form CTRV propagation; v and omega are carried over unchanged.
ObjectState stepCtrv(const ObjectState& s, double dt);

/// Relative pose perturbed by zero-mean Gaussian noise on each axis.
Pose2 generateOdometry(const Pose2& true_between, const SensorModel& model, Rng& rng);

/// True when the open segment a-b crosses any occluder.
bool lineOfSightBlocked(const Eigen::Vector2d& a, const Eigen::Vector2d& b, std::span<const Segment2> occluders);

/// Indices (into `objects`) of objects in range, inside the field of view and not occluded.
std::vector<int> visibleObjects(const Pose2& vehicle, const SensorModel& sensor,
                                std::span<const ObjectState> objects, std::span<const Segment2> occluders);

/// Indices of landmarks within `range` with a clear line of sight.
std::vector<int> visibleLandmarks(const Pose2& vehicle, double range, double fov,
                                  std::span<const Eigen::Vector2d> landmarks,
                                  std::span<const Segment2> occluders);

/// Confidence assigned to a true detection at a given range.
double rangeConfidence(double range, double max_range);

struct ObjectExtent {
  double length = 4.5;
  double width = 1.8;
};

/// Noisy detections of the visible objects plus Poisson false positives.
/// `visible_ids` index into `objects`/`extents`; `truth_ids` (same length as objects) label them.
std::vector<Detection> detectObjects(const Pose2& vehicle, std::span<const int> visible_ids,
                                     std::span<const ObjectState> objects,
                                     std::span<const ObjectExtent> extents, std::span<const int> truth_ids,
                                     const SensorModel& model, int stamp, int vehicle_id, Rng& rng);

/// Rasterizes detections: cell = max_j conf_j * exp(-d^2 / (2 sigma^2)).
/// Kernel contributions below 1e-4 of the peak are truncated.
perception::ConfidenceMap confidenceMap(int vehicle_id, int stamp, std::span<const Detection> detections,
                                        const perception::GridSpec& grid);

}  // namespace cslammot::sim
