#include "cslammot/perception/fusion.hpp"

#include <algorithm>
#include <numeric>

namespace cslammot::perception {

OrientedBox boxOf(const sim::Detection& d) { return {d.pose_in_vehicle, d.length, d.width}; }

std::vector<sim::Detection> fuseDetections(std::span<const sim::Detection> ego,
                                           std::span<const std::vector<sim::Detection>> received,
                                           double iou_nms) {
  std::vector<sim::Detection> pool(ego.begin(), ego.end());
  for (const auto& list : received) pool.insert(pool.end(), list.begin(), list.end());

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pool[a].confidence > pool[b].confidence; });

  std::vector<bool> used(pool.size(), false);
  std::vector<sim::Detection> fused;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t seed = order[oi];
    if (used[seed]) continue;
    used[seed] = true;
    const OrientedBox seed_box = boxOf(pool[seed]);
    std::vector<std::size_t> group{seed};
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t cand = order[oj];
      if (used[cand]) continue;
      if (orientedIou(seed_box, boxOf(pool[cand])) >= iou_nms) {
        used[cand] = true;
        group.push_back(cand);
      }
    }
    if (group.size() == 1) {
      fused.push_back(pool[seed]);
      continue;
    }
    const sim::Detection& s = pool[seed];
    double wsum = 0.0;
    double x = 0.0, y = 0.0, dyaw = 0.0, len = 0.0, wid = 0.0, miss = 1.0;
    for (std::size_t idx : group) {
      const auto& d = pool[idx];
      const double w = d.confidence;
      wsum += w;
      x += w * d.pose_in_vehicle.x();
      y += w * d.pose_in_vehicle.y();
      dyaw += w * normalizeAngle(d.pose_in_vehicle.yaw() - s.pose_in_vehicle.yaw());
      len += w * d.length;
      wid += w * d.width;
      miss *= 1.0 - d.confidence;
    }
    sim::Detection m = s;
    if (wsum > 0.0) {
      m.pose_in_vehicle = Pose2(x / wsum, y / wsum, s.pose_in_vehicle.yaw() + dyaw / wsum);
      m.length = len / wsum;
      m.width = wid / wsum;
    }
    m.confidence = 1.0 - miss;
    fused.push_back(m);
  }
  return fused;
}

}  // namespace cslammot::perception
