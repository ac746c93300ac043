#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cslammot/perception/grid.hpp"
#include "cslammot/sim/sensors.hpp"

namespace cslammot::perception {

/// Bit = 1 iff confidence >= threshold.
BinaryMask dynamicMask(const ConfidenceMap& map, double threshold);

/// Complement map: 1 - C.
ConfidenceMap requestMap(const ConfidenceMap& map);

struct VehicleDecision {
  bool selected = false;
  double iou = 0.0;
};

/// Complementarity of two dynamic masks on a shared grid. Selected iff the
/// intersection-over-union is at most `max_iou` and the neighbor covers at least
/// one cell the ego does not. Throws std::invalid_argument on a grid mismatch.
VehicleDecision decideVehicle(const BinaryMask& ego, const BinaryMask& neighbor, double max_iou);

/// Critical-area mask from score = C_n * N_e: cells with score >= min_score,
/// capped to the `budget` highest scores (ties by ascending cell index).
BinaryMask selectAreas(const ConfidenceMap& neighbor_conf, const ConfidenceMap& ego_request, double min_score,
                       std::size_t budget);

struct SelectionDecision {
  int neighbor = -1;
  bool selected = false;
  double complementarity_iou = 0.0;
  BinaryMask area_mask;
};

/// One transmitted detection; the box stays in the sender's frame, `cell` indexes the ego grid.
struct DetectionEntry {
  std::uint32_t cell = 0;
  Pose2 pose;
  double length = 0.0;
  double width = 0.0;
  double confidence = 0.0;
  int truth_id = -1;  ///< evaluation only; not part of the wire format
};

struct SelectedDetections {
  int sender = -1;
  int stamp = -1;
  std::vector<DetectionEntry> entries;
  /// Cells transmitted without content (dense, unselected payloads only).
  std::uint32_t empty_cells = 0;

  std::size_t entryCount() const { return entries.size() + empty_cells; }
};

/// Keeps detections whose center, mapped into the ego grid, lands on a set mask bit.
SelectedDetections packSelected(std::span<const sim::Detection> neighbor_detections, const BinaryMask& mask,
                                const Pose2& neighbor_in_ego, int sender, int stamp);

/// Dense payload: every grid cell is transmitted, cells with a detection center carry it.
SelectedDetections packDense(std::span<const sim::Detection> neighbor_detections, const GridSpec& ego_grid,
                             const Pose2& neighbor_in_ego, int sender, int stamp);

/// Re-expresses received boxes in the ego frame; extents and confidences are unchanged.
std::vector<sim::Detection> warpToEgo(const SelectedDetections& payload, const Pose2& neighbor_in_ego);

}  // namespace cslammot::perception
