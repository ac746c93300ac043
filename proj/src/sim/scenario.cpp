#include "cslammot/sim/scenario.hpp"

#include <stdexcept>

#include "cslammot/sim/sensors.hpp"

namespace cslammot::sim {

bool SensorModel::valid() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  auto nonneg = [](const NoiseTriple& n) {
    return n.longitudinal >= 0.0 && n.lateral >= 0.0 && n.yaw >= 0.0;
  };
  return max_range > 0.0 && fov > 0.0 && prob(detect_prob_visible) && false_positive_rate >= 0.0 &&
         nonneg(detection_noise) && nonneg(odom_noise);
}

void Scenario::validate() const {
  if (duration_steps < 1) throw std::invalid_argument("scenario: duration_steps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
  if (vehicles.empty()) throw std::invalid_argument("scenario: at least one vehicle required");
  if (!sensor.valid()) throw std::invalid_argument("scenario: sensor model out of range");
  if (!grid.valid()) throw std::invalid_argument("scenario: invalid grid spec");
  if (keyframe_stride < 1) throw std::invalid_argument("scenario: keyframe_stride must be >= 1");
  if (features.descriptor_dim < 1 || features.keypoint_descriptor_dim < 1) {
    throw std::invalid_argument("scenario: descriptor dimensions must be >= 1");
  }
  auto check_tracks = [](const std::vector<TrackSpec>& tracks, const char* what) {
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const auto& t = tracks[i];
      if (!(t.length > 0.0) || !(t.width > 0.0)) {
        throw std::invalid_argument(std::string("scenario: non-positive extent in ") + what);
      }
      for (std::size_t j = i + 1; j < tracks.size(); ++j) {
        if (tracks[j].id == t.id) throw std::invalid_argument(std::string("scenario: duplicate id in ") + what);
      }
    }
  };
  check_tracks(vehicles, "vehicles");
  check_tracks(objects, "objects");
}

void addRectangle(std::vector<Segment2>& out, const Pose2& center, double length, double width) {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  const Eigen::Vector2d corners[4] = {
      center.transformFrom({hl, hw}), center.transformFrom({-hl, hw}),
      center.transformFrom({-hl, -hw}), center.transformFrom({hl, -hw})};
  for (int i = 0; i < 4; ++i) out.push_back({corners[i], corners[(i + 1) % 4]});
}

int WorldTruth::steps() const {
  if (!vehicles.empty()) return static_cast<int>(vehicles.front().size());
  if (!objects.empty()) return static_cast<int>(objects.front().size());
  return 0;
}

namespace {

std::vector<ObjectState> rollout(const TrackSpec& spec, int steps, double dt) {
  std::vector<ObjectState> states;
  states.reserve(static_cast<std::size_t>(steps));
  ObjectState s{spec.initial, 0.0, 0.0};
  std::size_t seg = 0;
  for (int k = 0; k < steps; ++k) {
    while (seg < spec.segments.size() && spec.segments[seg].start_step <= k) {
      s.v = spec.segments[seg].v;
      s.omega = spec.segments[seg].omega;
      ++seg;
    }
    states.push_back(s);
    s = stepCtrv(s, dt);
  }
  return states;
}

}  // namespace

WorldTruth generateTruth(const Scenario& scenario) {
  scenario.validate();
  WorldTruth truth;
  truth.dt = scenario.dt;
  for (const auto& v : scenario.vehicles) truth.vehicles.push_back(rollout(v, scenario.duration_steps, scenario.dt));
  for (const auto& o : scenario.objects) truth.objects.push_back(rollout(o, scenario.duration_steps, scenario.dt));
  return truth;
}

}  // namespace cslammot::sim
