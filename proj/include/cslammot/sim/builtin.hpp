#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cslammot/sim/scenario.hpp"

namespace cslammot::sim {

/// Uniform landmarks in [-half_extent, half_extent]^2, avoiding the two road corridors
/// (|x| or |y| below road_half_width) and the interior of the given rectangles.
struct LandmarkField {
  int count = 1000;
  double half_extent = 150.0;
  double road_half_width = 7.0;
};

struct Rect {
  Pose2 center;
  double length = 1.0;
  double width = 1.0;
};

std::vector<Eigen::Vector2d> generateLandmarks(const LandmarkField& field, const std::vector<Rect>& keep_out,
                                               std::uint64_t seed);

/// Four-way intersection with corner buildings. V0 drives east toward the intersection,
/// V1 leads on the same road, V2 crosses northbound, V3 is oncoming. Most of the eight
/// objects are cross traffic hidden from V0 by the buildings.
Scenario standardOcclusion(std::uint64_t seed = 1);

/// One road with an ego (V0) and an overlapping leader (V1); V2 and V3 drive parallel roads
/// far outside sensor range but inside communication range.
Scenario collaboratorCount(std::uint64_t seed = 1);

/// Copy with every sensor noise, false positive and missed detection removed.
Scenario noiseless(Scenario scenario);

std::vector<std::string> builtinScenarioNames();
/// Throws std::invalid_argument for an unknown name.
Scenario builtinScenario(const std::string& name, std::uint64_t seed);

}  // namespace cslammot::sim
