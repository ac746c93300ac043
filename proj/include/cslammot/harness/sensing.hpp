#pragma once

#include <cstdint>
#include <vector>

#include "cslammot/sim/scenario.hpp"
#include "cslammot/sim/sensors.hpp"
#include "cslammot/sim/trace.hpp"

namespace cslammot::harness {

/// Independent random stream per (seed, purpose, vehicle, step).
enum Stream : std::uint64_t {
  kOdometryStream = 1,
  kDetectionStream = 2,
  kDescriptorStream = 3,
  kKeypointStream = 4,
  kRansacStream = 5,
};

/// Odometry and object detections of every vehicle, identical across modes and runs.
class SensorSuite {
 public:
  SensorSuite(const sim::Scenario& scenario, const sim::WorldTruth& truth);

  /// Noisy increment from k-1 to k; identity at k = 0.
  Pose2 odometry(int vehicle, int k) const;
  std::vector<sim::Detection> detections(int vehicle, int k) const;

 private:
  const sim::Scenario& scenario_;
  const sim::WorldTruth& truth_;
  std::vector<sim::ObjectExtent> extents_;
  std::vector<int> truth_ids_;
};

/// Sensor stream of every vehicle in trace form, ordered by step then vehicle.
std::vector<sim::TraceRecord> recordTrace(const sim::Scenario& scenario);

}  // namespace cslammot::harness
