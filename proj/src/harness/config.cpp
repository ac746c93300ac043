#include "cslammot/harness/config.hpp"

#include <cmath>
#include <stdexcept>

#include "cslammot/sim/scenario_io.hpp"

namespace cslammot::harness {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("run config: " + what); }

template <typename T>
void readIf(const YAML::Node& node, const std::string& key, T& out) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    fail("bad value for '" + key + "': " + e.what());
  }
}

bool inUnit(double v) { return v >= 0.0 && v <= 1.0; }

Eigen::Matrix3d diag3(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) fail(what + " must be three standard deviations");
  const Eigen::Vector3d s(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
  if ((s.array() <= 0.0).any()) fail(what + " must be positive");
  return s.cwiseProduct(s).asDiagonal();
}

}  // namespace

const char* toString(Mode mode) {
  switch (mode) {
    case Mode::kSingleVehicle:
      return "single_vehicle";
    case Mode::kCoopSlamOnly:
      return "coop_slam_only";
    case Mode::kCoopPerceptionOnly:
      return "coop_perception_only";
    case Mode::kFull:
      return "full";
  }
  return "?";
}

Mode parseMode(const std::string& text) {
  for (Mode m : {Mode::kSingleVehicle, Mode::kCoopSlamOnly, Mode::kCoopPerceptionOnly, Mode::kFull}) {
    if (text == toString(m)) return m;
  }
  fail("unknown mode '" + text + "'");
}

const char* toString(PerceptionProtocol protocol) {
  return protocol == PerceptionProtocol::kSelective ? "selective" : "full_broadcast";
}

PerceptionProtocol parsePerceptionProtocol(const std::string& text) {
  if (text == "selective") return PerceptionProtocol::kSelective;
  if (text == "full_broadcast") return PerceptionProtocol::kFullBroadcast;
  fail("unknown perception protocol '" + text + "'");
}

bool usesSlamChannel(Mode mode) { return mode == Mode::kCoopSlamOnly || mode == Mode::kFull; }
bool usesPerceptionChannel(Mode mode) { return mode == Mode::kCoopPerceptionOnly || mode == Mode::kFull; }

void RunConfig::validate() const {
  scenario.validate();
  const auto& s = selection;
  if (!(s.place_threshold >= 0.0 && s.place_threshold <= 2.0)) fail("place_threshold must be in [0, 2]");
  if (!inUnit(s.complementarity_iou)) fail("complementarity_iou must be in [0, 1]");
  if (!inUnit(s.dynamic_threshold)) fail("dynamic_threshold must be in [0, 1]");
  if (!inUnit(s.min_score)) fail("min_score must be in [0, 1]");
  if (s.k_collaborators < 0) fail("k_collaborators must be >= 0");
  if (s.sequence_window < 1) fail("sequence_window must be >= 1");
  if (!(s.match_ratio > 0.0 && s.match_ratio <= 1.0)) fail("match_ratio must be in (0, 1]");
  if (!network.valid()) fail("invalid network model");
  if (backend.keyframe_stride < 1 || backend.horizon < 2 * backend.keyframe_stride) {
    fail("horizon must cover at least two keyframes");
  }
  if (ransac.iterations < 1 || ransac.min_inliers < 2 || !(ransac.inlier_tol > 0.0)) fail("invalid RANSAC params");
  for (int e : egos) {
    if (e < 0 || e >= static_cast<int>(scenario.vehicles.size())) fail("ego id out of range");
  }
}

std::vector<int> RunConfig::egoList() const {
  if (!egos.empty()) return egos;
  std::vector<int> all(scenario.vehicles.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

RunConfig runConfigFromYaml(const YAML::Node& root) {
  if (!root || !root.IsMap()) fail("top level must be a mapping");
  if (!root["scenario"]) fail("missing 'scenario' section");
  RunConfig c;
  const YAML::Node run = root["run"] ? root["run"] : YAML::Node(YAML::NodeType::Map);
  c.scenario_node = YAML::Clone(root["scenario"]);
  if (run["seed"]) c.scenario_node["seed"] = run["seed"].as<std::uint64_t>();
  c.scenario = sim::scenarioFromYaml(c.scenario_node);
  c.seed = c.scenario.seed;

  if (run["mode"]) c.mode = parseMode(run["mode"].as<std::string>());
  if (run["perception"]) c.perception = parsePerceptionProtocol(run["perception"].as<std::string>());
  if (const auto s = run["selection"]) {
    auto& sel = c.selection;
    readIf(s, "place_threshold", sel.place_threshold);
    readIf(s, "complementarity_iou", sel.complementarity_iou);
    readIf(s, "dynamic_threshold", sel.dynamic_threshold);
    readIf(s, "min_score", sel.min_score);
    readIf(s, "max_cells", sel.max_cells);
    readIf(s, "k_collaborators", sel.k_collaborators);
    readIf(s, "sequence_window", sel.sequence_window);
    readIf(s, "match_ratio", sel.match_ratio);
    if (s["perception_budget_bytes"]) sel.perception_budget_bytes = s["perception_budget_bytes"].as<std::uint64_t>();
  }
  if (const auto n = run["network"]) {
    readIf(n, "pair_budget_bytes", c.network.pair_budget_bytes);
    readIf(n, "max_comm_range", c.network.max_comm_range);
    readIf(n, "max_deferral_steps", c.network.max_deferral_steps);
  }
  c.backend.dt = c.scenario.dt;
  c.backend.keyframe_stride = c.scenario.keyframe_stride;
  if (const auto b = run["backend"]) {
    readIf(b, "horizon", c.backend.horizon);
    readIf(b, "max_iterations", c.backend.optimizer.max_iterations);
    readIf(b, "calibrate_odometry_noise", c.calibrate_odometry_noise);
    if (b["odometry_sigma"]) {
      c.backend.noise.odometry = diag3(b["odometry_sigma"], "odometry_sigma");
      c.calibrate_odometry_noise = false;
    }
    if (b["perception_sigma"]) c.backend.noise.perception = diag3(b["perception_sigma"], "perception_sigma");
    if (b["motion_sigma"]) c.backend.noise.motion = diag3(b["motion_sigma"], "motion_sigma");
    if (const auto t = b["tracking"]) {
      auto& tp = c.backend.tracking;
      readIf(t, "gate", tp.gate);
      readIf(t, "birth_frames", tp.birth_frames);
      readIf(t, "death_frames", tp.death_frames);
      readIf(t, "birth_distance", tp.birth_distance);
      readIf(t, "outlier_weight", tp.outlier_weight);
    }
  }
  if (const auto r = run["ransac"]) {
    readIf(r, "iterations", c.ransac.iterations);
    readIf(r, "inlier_tol", c.ransac.inlier_tol);
    readIf(r, "min_inliers", c.ransac.min_inliers);
  }
  readIf(run, "egos", c.egos);
  readIf(run, "perfect_pose_warping", c.perfect_pose_warping);
  readIf(run, "output_dir", c.output_dir);
  c.validate();
  return c;
}

RunConfig loadRunConfig(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    fail(path + ": " + e.what());
  }
  RunConfig c = runConfigFromYaml(root);
  c.scenario_path = path;
  return c;
}

RunConfig withSeed(const RunConfig& config, std::uint64_t seed) {
  RunConfig c = config;
  c.seed = seed;
  if (config.scenario_node) {
    c.scenario_node = YAML::Clone(config.scenario_node);
    c.scenario_node["seed"] = seed;
    c.scenario = sim::scenarioFromYaml(c.scenario_node);
  } else {
    c.scenario.seed = seed;
  }
  return c;
}

}  // namespace cslammot::harness
