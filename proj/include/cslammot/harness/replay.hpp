#pragma once

#include <vector>

#include "cslammot/graph/backend.hpp"
#include "cslammot/harness/metrics.hpp"
#include "cslammot/sim/trace.hpp"

namespace cslammot::harness {

struct ReplayVehicle {
  int vehicle = -1;
  std::size_t steps = 0;
  ErrorStats accuracy;
  ErrorStats dead_reckoning;
};

/// Single-vehicle estimation from recorded odometry and detections. Each vehicle's records
/// must cover consecutive steps; the estimator is anchored at the first recorded truth pose.
/// Throws std::invalid_argument on gaps or duplicates.
std::vector<ReplayVehicle> replayTrace(const std::vector<sim::TraceRecord>& records,
                                       const graph::BackendParams& params);

}  // namespace cslammot::harness
