#include "cslammot/harness/replay.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cslammot::harness {

std::vector<ReplayVehicle> replayTrace(const std::vector<sim::TraceRecord>& records,
                                       const graph::BackendParams& params) {
  std::map<int, std::vector<const sim::TraceRecord*>> by_vehicle;
  for (const auto& r : records) by_vehicle[r.vehicle].push_back(&r);
  std::vector<ReplayVehicle> out;
  for (auto& [vehicle, list] : by_vehicle) {
    std::stable_sort(list.begin(), list.end(), [](const auto* a, const auto* b) { return a->step < b->step; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->step != list[i - 1]->step + 1) {
        throw std::invalid_argument("replay: vehicle " + std::to_string(vehicle) + " has a gap or duplicate at step " +
                                    std::to_string(list[i]->step));
      }
    }
    // Keyframes follow the absolute step index, so the first record is shifted onto one.
    const int offset = list.front()->step;
    graph::SlammotBackend backend(vehicle, params, list.front()->truth);
    std::map<int, Pose2> truth;
    std::map<int, Pose2> dead;
    Pose2 dr = list.front()->truth;
    for (const auto* r : list) {
      const int k = r->step - offset;
      if (k > 0) dr = compose(dr, r->odometry);
      auto detections = r->detections;
      for (auto& d : detections) d.stamp = k;
      backend.step(k, r->odometry, detections);
      truth[k] = r->truth;
      dead[k] = dr;
    }
    ReplayVehicle v;
    v.vehicle = vehicle;
    v.steps = list.size();
    const auto estimates = backend.keyframeEstimates();
    std::map<int, Pose2> dead_at_keyframes;
    for (const auto& [k, p] : estimates) dead_at_keyframes[k] = dead.at(k);
    v.accuracy = egoAccuracy(estimates, truth);
    v.dead_reckoning = egoAccuracy(dead_at_keyframes, truth);
    out.push_back(v);
  }
  return out;
}

}  // namespace cslammot::harness
