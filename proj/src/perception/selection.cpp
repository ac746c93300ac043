#include "cslammot/perception/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cslammot::perception {

BinaryMask dynamicMask(const ConfidenceMap& map, double threshold) {
  BinaryMask mask(map.grid);
  for (std::size_t i = 0; i < map.values.size(); ++i) mask.bits[i] = map.values[i] >= threshold ? 1 : 0;
  return mask;
}

ConfidenceMap requestMap(const ConfidenceMap& map) {
  ConfidenceMap out = map;
  for (auto& v : out.values) v = 1.0 - v;
  return out;
}

VehicleDecision decideVehicle(const BinaryMask& ego, const BinaryMask& neighbor, double max_iou) {
  if (!(ego.grid == neighbor.grid) || ego.bits.size() != neighbor.bits.size()) {
    throw std::invalid_argument("decideVehicle: masks are on different grids");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  std::size_t novel = 0;
  for (std::size_t i = 0; i < ego.bits.size(); ++i) {
    const bool e = ego.bits[i] != 0;
    const bool n = neighbor.bits[i] != 0;
    inter += (e && n) ? 1 : 0;
    uni += (e || n) ? 1 : 0;
    novel += (n && !e) ? 1 : 0;
  }
  VehicleDecision d;
  d.iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  d.selected = d.iou <= max_iou && novel > 0;
  return d;
}

BinaryMask selectAreas(const ConfidenceMap& neighbor_conf, const ConfidenceMap& ego_request, double min_score,
                       std::size_t budget) {
  if (!(neighbor_conf.grid == ego_request.grid)) {
    throw std::invalid_argument("selectAreas: maps are on different grids");
  }
  BinaryMask mask(neighbor_conf.grid);
  std::vector<std::pair<double, std::uint32_t>> qualifying;
  for (std::size_t i = 0; i < neighbor_conf.values.size(); ++i) {
    const double score = neighbor_conf.values[i] * ego_request.values[i];
    if (score >= min_score) qualifying.emplace_back(score, static_cast<std::uint32_t>(i));
  }
  if (qualifying.size() > budget) {
    std::partial_sort(qualifying.begin(), qualifying.begin() + static_cast<std::ptrdiff_t>(budget), qualifying.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    qualifying.resize(budget);
  }
  for (const auto& [score, idx] : qualifying) mask.bits[idx] = 1;
  return mask;
}

namespace {

DetectionEntry toEntry(const sim::Detection& d, std::uint32_t cell) {
  return {cell, d.pose_in_vehicle, d.length, d.width, d.confidence, d.truth_id};
}

}  // namespace

SelectedDetections packSelected(std::span<const sim::Detection> neighbor_detections, const BinaryMask& mask,
                                const Pose2& neighbor_in_ego, int sender, int stamp) {
  SelectedDetections out;
  out.sender = sender;
  out.stamp = stamp;
  for (const auto& d : neighbor_detections) {
    const auto cell = mask.grid.cellIndexOf(neighbor_in_ego.transformFrom(d.pose_in_vehicle.translation()));
    if (!cell || mask.bits[static_cast<std::size_t>(*cell)] == 0) continue;
    out.entries.push_back(toEntry(d, static_cast<std::uint32_t>(*cell)));
  }
  return out;
}

SelectedDetections packDense(std::span<const sim::Detection> neighbor_detections, const GridSpec& ego_grid,
                             const Pose2& neighbor_in_ego, int sender, int stamp) {
  SelectedDetections out;
  out.sender = sender;
  out.stamp = stamp;
  std::vector<std::uint32_t> used;
  for (const auto& d : neighbor_detections) {
    const auto cell = ego_grid.cellIndexOf(neighbor_in_ego.transformFrom(d.pose_in_vehicle.translation()));
    if (!cell) continue;
    out.entries.push_back(toEntry(d, static_cast<std::uint32_t>(*cell)));
    used.push_back(static_cast<std::uint32_t>(*cell));
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  out.empty_cells = static_cast<std::uint32_t>(ego_grid.cellCount()) - static_cast<std::uint32_t>(used.size());
  return out;
}

std::vector<sim::Detection> warpToEgo(const SelectedDetections& payload, const Pose2& neighbor_in_ego) {
  std::vector<sim::Detection> out;
  out.reserve(payload.entries.size());
  for (const auto& e : payload.entries) {
    sim::Detection d;
    d.pose_in_vehicle = compose(neighbor_in_ego, e.pose);
    d.length = e.length;
    d.width = e.width;
    d.confidence = e.confidence;
    d.stamp = payload.stamp;
    d.source_vehicle = payload.sender;
    d.truth_id = e.truth_id;
    out.push_back(d);
  }
  return out;
}

}  // namespace cslammot::perception
