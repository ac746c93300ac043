#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "cslammot/comms/network.hpp"
#include "cslammot/graph/backend.hpp"
#include "cslammot/sim/scenario.hpp"
#include "cslammot/slam/ransac.hpp"

namespace cslammot::harness {

enum class Mode { kSingleVehicle, kCoopSlamOnly, kCoopPerceptionOnly, kFull };
enum class PerceptionProtocol { kSelective, kFullBroadcast };

const char* toString(Mode mode);
/// Accepts single_vehicle, coop_slam_only, coop_perception_only, full.
Mode parseMode(const std::string& text);
const char* toString(PerceptionProtocol protocol);
PerceptionProtocol parsePerceptionProtocol(const std::string& text);

bool usesSlamChannel(Mode mode);
bool usesPerceptionChannel(Mode mode);

struct SelectionParams {
  /// Max sequence-descriptor distance for the best place match.
  double place_threshold = 0.3;
  /// Max dynamic-mask IoU for a neighbor to count as complementary.
  double complementarity_iou = 0.5;
  /// Confidence threshold of the dynamic mask.
  double dynamic_threshold = 0.3;
  /// Minimum critical-area score.
  double min_score = 0.1;
  /// Max cells in a critical-area mask.
  std::size_t max_cells = 512;
  /// SLAM collaborators taken from the similarity ranking.
  int k_collaborators = 1;
  /// Keyframes aggregated into a sequence descriptor.
  int sequence_window = 3;
  /// Lowe ratio of the keypoint matcher.
  double match_ratio = 0.8;
  /// Detection payload cap per neighbor and step, bytes; unset means unlimited.
  std::optional<std::uint64_t> perception_budget_bytes;
};

struct RunConfig {
  sim::Scenario scenario;
  /// Source file of the scenario; empty for builtin or programmatic scenarios.
  std::string scenario_path;
  /// Parsed `scenario:` section, re-read when the seed changes; null for programmatic scenarios.
  YAML::Node scenario_node;
  std::uint64_t seed = 1;
  Mode mode = Mode::kFull;
  PerceptionProtocol perception = PerceptionProtocol::kSelective;
  SelectionParams selection;
  comms::NetworkModel network;
  graph::BackendParams backend;
  slam::RansacParams ransac;
  /// Vehicles that run the estimator; empty means all.
  std::vector<int> egos;
  /// Warp neighbor maps and detections with true relative poses.
  bool perfect_pose_warping = true;
  /// Derive the odometry noise model from the scenario's odometry noise.
  bool calibrate_odometry_noise = true;
  std::string output_dir;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  std::vector<int> egoList() const;
};

/// Reads `scenario:` (see scenarioFromYaml) and `run:` sections. The seed in `run:` (or
/// the scenario seed) is applied to the scenario.
RunConfig runConfigFromYaml(const YAML::Node& root);
RunConfig loadRunConfig(const std::string& path);
/// Replaces the seed everywhere it matters, regenerating seed-dependent scenario content.
RunConfig withSeed(const RunConfig& config, std::uint64_t seed);

}  // namespace cslammot::harness
