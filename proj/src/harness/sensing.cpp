#include "cslammot/harness/sensing.hpp"

namespace cslammot::harness {

SensorSuite::SensorSuite(const sim::Scenario& scenario, const sim::WorldTruth& truth)
    : scenario_(scenario), truth_(truth) {
  for (const auto& o : scenario.objects) {
    extents_.push_back({o.length, o.width});
    truth_ids_.push_back(o.id);
  }
}

Pose2 SensorSuite::odometry(int vehicle, int k) const {
  if (k == 0) return Pose2();
  const auto& track = truth_.vehicles[static_cast<std::size_t>(vehicle)];
  Rng rng = makeRng(scenario_.seed,
                    {kOdometryStream, static_cast<std::uint64_t>(vehicle), static_cast<std::uint64_t>(k)});
  return sim::generateOdometry(between(track[static_cast<std::size_t>(k - 1)].pose, track[static_cast<std::size_t>(k)].pose),
                               scenario_.sensor, rng);
}

std::vector<sim::Detection> SensorSuite::detections(int vehicle, int k) const {
  std::vector<sim::ObjectState> objects;
  objects.reserve(truth_.objects.size());
  for (const auto& o : truth_.objects) objects.push_back(o[static_cast<std::size_t>(k)]);
  const Pose2& pose = truth_.vehicles[static_cast<std::size_t>(vehicle)][static_cast<std::size_t>(k)].pose;
  const auto visible = sim::visibleObjects(pose, scenario_.sensor, objects, scenario_.occluders);
  Rng rng = makeRng(scenario_.seed,
                    {kDetectionStream, static_cast<std::uint64_t>(vehicle), static_cast<std::uint64_t>(k)});
  return sim::detectObjects(pose, visible, objects, extents_, truth_ids_, scenario_.sensor, k, vehicle, rng);
}

std::vector<sim::TraceRecord> recordTrace(const sim::Scenario& scenario) {
  const auto truth = sim::generateTruth(scenario);
  const SensorSuite sensors(scenario, truth);
  std::vector<sim::TraceRecord> out;
  for (int k = 0; k < scenario.duration_steps; ++k) {
    for (int v = 0; v < static_cast<int>(scenario.vehicles.size()); ++v) {
      out.push_back({k, v, truth.vehicles[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)].pose,
                     sensors.odometry(v, k), sensors.detections(v, k)});
    }
  }
  return out;
}

}  // namespace cslammot::harness
