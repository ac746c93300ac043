#include "cslammot/sim/builtin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cslammot/rng.hpp"

namespace cslammot::sim {

namespace {

constexpr double kPi = std::numbers::pi;

bool insideRect(const Rect& r, const Eigen::Vector2d& p) {
  const Eigen::Vector2d local = r.center.transformTo(p);
  return std::abs(local.x()) <= 0.5 * r.length && std::abs(local.y()) <= 0.5 * r.width;
}

TrackSpec track(int id, double x, double y, double yaw, std::vector<MotionSegment> segments) {
  TrackSpec t;
  t.id = id;
  t.initial = Pose2(x, y, yaw);
  t.segments = std::move(segments);
  return t;
}

/// Dense, long-range landmarks and coarse sectors keep same-place descriptor distances
/// below the default place threshold while places 20 m apart stay above it.
FeatureModel calibratedFeatures() {
  FeatureModel f;
  f.descriptor_dim = 32;
  f.landmark_range = 80.0;
  return f;
}

std::vector<Rect> cornerBuildings() {
  // Blocks span 10..45 m from the road centerlines in each quadrant.
  std::vector<Rect> out;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) out.push_back({Pose2(sx * 27.5, sy * 27.5, 0.0), 35.0, 35.0});
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector2d> generateLandmarks(const LandmarkField& field, const std::vector<Rect>& keep_out,
                                               std::uint64_t seed) {
  Rng rng = makeRng(seed, {0x4c414e44u});
  std::uniform_real_distribution<double> u(-field.half_extent, field.half_extent);
  std::vector<Eigen::Vector2d> out;
  out.reserve(static_cast<std::size_t>(field.count));
  int attempts = 0;
  while (static_cast<int>(out.size()) < field.count && attempts < 100 * field.count) {
    ++attempts;
    const Eigen::Vector2d p(u(rng), u(rng));
    if (std::abs(p.x()) < field.road_half_width || std::abs(p.y()) < field.road_half_width) continue;
    bool blocked = false;
    for (const auto& r : keep_out) blocked = blocked || insideRect(r, p);
    if (!blocked) out.push_back(p);
  }
  return out;
}

Scenario standardOcclusion(std::uint64_t seed) {
  Scenario s;
  s.name = "standard_occlusion";
  s.seed = seed;
  s.duration_steps = 200;
  s.dt = 0.1;

  s.vehicles = {
      track(0, -80.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      track(1, -20.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      track(2, 3.0, -60.0, 0.5 * kPi, {{0, 6.0, 0.0}}),
      track(3, 80.0, 3.0, kPi, {{0, 8.0, 0.0}}),
  };

  s.objects = {
      track(0, -3.0, 50.0, -0.5 * kPi, {{0, 5.0, 0.0}}),
      track(1, 3.0, -42.0, 0.5 * kPi, {{0, 6.0, 0.0}}),
      track(2, 40.0, 3.0, kPi, {{0, 7.0, 0.0}}),
      track(3, -3.0, 80.0, -0.5 * kPi, {{0, 7.0, 0.0}}),
      track(4, 3.0, 12.0, 0.5 * kPi, {{0, 4.0, 0.0}}),
      track(5, -50.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      // Southbound, then a 2 s quarter turn onto the eastbound lane.
      track(6, -3.0, 35.366, -0.5 * kPi, {{0, 5.0, 0.0}, {64, 5.0, 0.25 * kPi}, {84, 5.0, 0.0}}),
      track(7, 25.0, -8.5, 0.0, {{0, 0.0, 0.0}}),
  };

  const auto buildings = cornerBuildings();
  for (const auto& b : buildings) addRectangle(s.occluders, b.center, b.length, b.width);
  LandmarkField field;
  field.count = 3000;
  s.landmarks = generateLandmarks(field, buildings, seed);
  s.features = calibratedFeatures();
  s.grid = perception::GridSpec::centered(200, 200, 0.5);
  s.keyframe_stride = 2;
  return s;
}

constexpr double kFarRoad = 220.0;
constexpr double kBandHalfWidth = 90.0;

Scenario collaboratorCount(std::uint64_t seed) {
  Scenario s;
  s.name = "collaborator_count";
  s.seed = seed;
  s.duration_steps = 200;
  s.dt = 0.1;
  s.vehicles = {
      track(0, -80.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      track(1, -20.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      track(2, -80.0, kFarRoad, 0.0, {{0, 8.0, 0.0}}),
      track(3, -80.0, -kFarRoad, 0.0, {{0, 8.0, 0.0}}),
  };
  s.objects = {
      track(0, -50.0, -3.0, 0.0, {{0, 8.0, 0.0}}),
      track(1, 60.0, 3.0, kPi, {{0, 7.0, 0.0}}),
      track(2, -40.0, kFarRoad - 3.0, 0.0, {{0, 8.0, 0.0}}),
      track(3, -40.0, -kFarRoad - 3.0, 0.0, {{0, 8.0, 0.0}}),
  };
  // One landmark band per road; the bands are farther apart than twice the feature range.
  LandmarkField field;
  field.half_extent = 180.0;
  field.count = 4300;
  for (int band = 0; band < 3; ++band) {
    const double offset = (band == 0 ? 0.0 : band == 1 ? kFarRoad : -kFarRoad);
    for (const auto& p : generateLandmarks(field, {}, seed * 3 + static_cast<std::uint64_t>(band))) {
      if (std::abs(p.y()) < kBandHalfWidth) s.landmarks.emplace_back(p.x(), p.y() + offset);
    }
  }
  s.features = calibratedFeatures();
  s.grid = perception::GridSpec::centered(200, 200, 0.5);
  return s;
}

Scenario noiseless(Scenario scenario) {
  scenario.sensor.detect_prob_visible = 1.0;
  scenario.sensor.false_positive_rate = 0.0;
  scenario.sensor.detection_noise = {};
  scenario.sensor.odom_noise = {};
  scenario.features.descriptor_noise = 0.0;
  scenario.features.keypoint_position_noise = 0.0;
  scenario.features.keypoint_descriptor_noise = 0.0;
  scenario.name += "_noiseless";
  return scenario;
}

std::vector<std::string> builtinScenarioNames() {
  return {"standard_occlusion", "collaborator_count", "standard_occlusion_noiseless"};
}

Scenario builtinScenario(const std::string& name, std::uint64_t seed) {
  if (name == "standard_occlusion") return standardOcclusion(seed);
  if (name == "collaborator_count") return collaboratorCount(seed);
  if (name == "standard_occlusion_noiseless") return noiseless(standardOcclusion(seed));
  throw std::invalid_argument("unknown builtin scenario: " + name);
}

}  // namespace cslammot::sim
