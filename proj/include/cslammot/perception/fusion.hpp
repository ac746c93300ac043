#pragma once

#include <span>
#include <vector>

#include "cslammot/perception/box.hpp"
#include "cslammot/sim/sensors.hpp"

namespace cslammot::perception {

OrientedBox boxOf(const sim::Detection& d);

/// Pools ego and received detections (all in the ego frame) and runs greedy
/// confidence-ordered NMS. Each group of boxes overlapping the group seed with
/// IoU >= `iou_nms` collapses into one box: confidence-weighted pose and extent,
/// confidence 1 - prod(1 - c_i).
std::vector<sim::Detection> fuseDetections(std::span<const sim::Detection> ego,
                                           std::span<const std::vector<sim::Detection>> received,
                                           double iou_nms = 0.1);

}  // namespace cslammot::perception
