#include "cslammot/sim/scenario_io.hpp"

#include <ostream>
#include <stdexcept>

#include "cslammot/sim/builtin.hpp"

namespace cslammot::sim {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("scenario file: " + what); }

template <typename T>
T get(const YAML::Node& node, const std::string& key) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    fail("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
void readIf(const YAML::Node& node, const std::string& key, T& out) {
  if (node[key]) out = get<T>(node, key);
}

Pose2 poseOf(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) fail(what + " must be [x, y, yaw]");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

NoiseTriple noiseOf(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) fail(what + " must be [longitudinal, lateral, yaw]");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

std::vector<TrackSpec> tracksOf(const YAML::Node& list, const std::string& what) {
  if (!list.IsSequence()) fail(what + " must be a list");
  std::vector<TrackSpec> out;
  for (const auto& n : list) {
    TrackSpec t;
    t.id = n["id"] ? n["id"].as<int>() : static_cast<int>(out.size());
    if (!n["initial"]) fail(what + " entry without 'initial'");
    t.initial = poseOf(n["initial"], what + ".initial");
    readIf(n, "length", t.length);
    readIf(n, "width", t.width);
    if (n["segments"]) {
      for (const auto& s : n["segments"]) {
        MotionSegment seg;
        readIf(s, "start_step", seg.start_step);
        readIf(s, "v", seg.v);
        readIf(s, "omega", seg.omega);
        t.segments.push_back(seg);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

YAML::Node tracksToYaml(const std::vector<TrackSpec>& tracks) {
  YAML::Node list(YAML::NodeType::Sequence);
  for (const auto& t : tracks) {
    YAML::Node n;
    n["id"] = t.id;
    YAML::Node init(YAML::NodeType::Sequence);
    init.push_back(t.initial.x());
    init.push_back(t.initial.y());
    init.push_back(t.initial.yaw());
    init.SetStyle(YAML::EmitterStyle::Flow);
    n["initial"] = init;
    n["length"] = t.length;
    n["width"] = t.width;
    YAML::Node segs(YAML::NodeType::Sequence);
    for (const auto& s : t.segments) {
      YAML::Node sn;
      sn["start_step"] = s.start_step;
      sn["v"] = s.v;
      sn["omega"] = s.omega;
      sn.SetStyle(YAML::EmitterStyle::Flow);
      segs.push_back(sn);
    }
    n["segments"] = segs;
    list.push_back(n);
  }
  return list;
}

YAML::Node tripleToYaml(const NoiseTriple& t) {
  YAML::Node n(YAML::NodeType::Sequence);
  n.push_back(t.longitudinal);
  n.push_back(t.lateral);
  n.push_back(t.yaw);
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

}  // namespace

Scenario scenarioFromYaml(const YAML::Node& node) {
  if (!node || !node.IsMap()) fail("'scenario' must be a mapping");
  Scenario s;
  std::uint64_t seed = 1;
  readIf(node, "seed", seed);
  if (node["builtin"]) {
    s = builtinScenario(get<std::string>(node, "builtin"), seed);
  }
  s.seed = seed;
  readIf(node, "name", s.name);
  readIf(node, "duration_steps", s.duration_steps);
  readIf(node, "dt", s.dt);
  readIf(node, "keyframe_stride", s.keyframe_stride);

  if (const auto sn = node["sensor"]) {
    readIf(sn, "max_range", s.sensor.max_range);
    readIf(sn, "fov", s.sensor.fov);
    readIf(sn, "detect_prob_visible", s.sensor.detect_prob_visible);
    readIf(sn, "false_positive_rate", s.sensor.false_positive_rate);
    if (sn["detection_noise"]) s.sensor.detection_noise = noiseOf(sn["detection_noise"], "sensor.detection_noise");
    if (sn["odom_noise"]) s.sensor.odom_noise = noiseOf(sn["odom_noise"], "sensor.odom_noise");
  }
  if (const auto fn = node["features"]) {
    readIf(fn, "descriptor_dim", s.features.descriptor_dim);
    readIf(fn, "descriptor_noise", s.features.descriptor_noise);
    readIf(fn, "keypoint_descriptor_dim", s.features.keypoint_descriptor_dim);
    readIf(fn, "keypoint_position_noise", s.features.keypoint_position_noise);
    readIf(fn, "keypoint_descriptor_noise", s.features.keypoint_descriptor_noise);
    readIf(fn, "landmark_range", s.features.landmark_range);
  }
  if (const auto gn = node["grid"]) {
    int h = s.grid.height;
    int w = s.grid.width;
    double res = s.grid.resolution;
    double sigma = s.grid.kernel_sigma;
    readIf(gn, "height", h);
    readIf(gn, "width", w);
    readIf(gn, "resolution", res);
    readIf(gn, "kernel_sigma", sigma);
    s.grid = perception::GridSpec::centered(h, w, res, sigma);
    if (gn["origin"]) s.grid.origin = poseOf(gn["origin"], "grid.origin");
  }
  if (node["vehicles"]) s.vehicles = tracksOf(node["vehicles"], "vehicles");
  if (node["objects"]) s.objects = tracksOf(node["objects"], "objects");

  std::vector<Rect> keep_out;
  if (const auto on = node["occluders"]) {
    s.occluders.clear();
    if (on["segments"]) {
      for (const auto& seg : on["segments"]) {
        if (!seg.IsSequence() || seg.size() != 4) fail("occluder segment must be [ax, ay, bx, by]");
        s.occluders.push_back({{seg[0].as<double>(), seg[1].as<double>()}, {seg[2].as<double>(), seg[3].as<double>()}});
      }
    }
    if (on["rectangles"]) {
      for (const auto& r : on["rectangles"]) {
        Rect rect{poseOf(r["center"], "rectangle.center"), get<double>(r, "length"), get<double>(r, "width")};
        addRectangle(s.occluders, rect.center, rect.length, rect.width);
        keep_out.push_back(rect);
      }
    }
  }
  if (const auto ln = node["landmarks"]) {
    s.landmarks.clear();
    if (!ln.IsSequence()) fail("landmarks must be a list of [x, y]");
    for (const auto& p : ln) {
      if (!p.IsSequence() || p.size() != 2) fail("landmark must be [x, y]");
      s.landmarks.emplace_back(p[0].as<double>(), p[1].as<double>());
    }
  }
  if (const auto lf = node["landmark_field"]) {
    LandmarkField field;
    readIf(lf, "count", field.count);
    readIf(lf, "half_extent", field.half_extent);
    readIf(lf, "road_half_width", field.road_half_width);
    s.landmarks = generateLandmarks(field, keep_out, seed);
  }
  s.validate();
  return s;
}

Scenario loadScenarioFile(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    fail(path + ": " + e.what());
  }
  return scenarioFromYaml(root["scenario"] ? root["scenario"] : root);
}

YAML::Node scenarioToYaml(const Scenario& s) {
  YAML::Node n;
  n["name"] = s.name;
  n["seed"] = s.seed;
  n["duration_steps"] = s.duration_steps;
  n["dt"] = s.dt;
  n["keyframe_stride"] = s.keyframe_stride;
  YAML::Node sensor;
  sensor["max_range"] = s.sensor.max_range;
  sensor["fov"] = s.sensor.fov;
  sensor["detect_prob_visible"] = s.sensor.detect_prob_visible;
  sensor["false_positive_rate"] = s.sensor.false_positive_rate;
  sensor["detection_noise"] = tripleToYaml(s.sensor.detection_noise);
  sensor["odom_noise"] = tripleToYaml(s.sensor.odom_noise);
  n["sensor"] = sensor;
  YAML::Node features;
  features["descriptor_dim"] = s.features.descriptor_dim;
  features["descriptor_noise"] = s.features.descriptor_noise;
  features["keypoint_descriptor_dim"] = s.features.keypoint_descriptor_dim;
  features["keypoint_position_noise"] = s.features.keypoint_position_noise;
  features["keypoint_descriptor_noise"] = s.features.keypoint_descriptor_noise;
  features["landmark_range"] = s.features.landmark_range;
  n["features"] = features;
  YAML::Node grid;
  grid["height"] = s.grid.height;
  grid["width"] = s.grid.width;
  grid["resolution"] = s.grid.resolution;
  grid["kernel_sigma"] = s.grid.kernel_sigma;
  YAML::Node origin(YAML::NodeType::Sequence);
  origin.push_back(s.grid.origin.x());
  origin.push_back(s.grid.origin.y());
  origin.push_back(s.grid.origin.yaw());
  origin.SetStyle(YAML::EmitterStyle::Flow);
  grid["origin"] = origin;
  n["grid"] = grid;
  n["vehicles"] = tracksToYaml(s.vehicles);
  n["objects"] = tracksToYaml(s.objects);
  YAML::Node occ;
  YAML::Node segs(YAML::NodeType::Sequence);
  for (const auto& seg : s.occluders) {
    YAML::Node e(YAML::NodeType::Sequence);
    e.push_back(seg.a.x());
    e.push_back(seg.a.y());
    e.push_back(seg.b.x());
    e.push_back(seg.b.y());
    e.SetStyle(YAML::EmitterStyle::Flow);
    segs.push_back(e);
  }
  occ["segments"] = segs;
  n["occluders"] = occ;
  YAML::Node lms(YAML::NodeType::Sequence);
  for (const auto& p : s.landmarks) {
    YAML::Node e(YAML::NodeType::Sequence);
    e.push_back(p.x());
    e.push_back(p.y());
    e.SetStyle(YAML::EmitterStyle::Flow);
    lms.push_back(e);
  }
  n["landmarks"] = lms;
  return n;
}

void saveScenario(std::ostream& out, const Scenario& scenario) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  YAML::Node root;
  root["scenario"] = scenarioToYaml(scenario);
  e << root;
  out << e.c_str() << '\n';
}

}  // namespace cslammot::sim
