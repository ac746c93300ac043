#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cslammot/comms/ledger.hpp"
#include "cslammot/harness/config.hpp"
#include "cslammot/harness/metrics.hpp"

namespace cslammot::harness {

inline constexpr std::array<double, 3> kApThresholds{0.3, 0.5, 0.7};

struct EgoReport {
  int vehicle = -1;
  /// Final keyframe estimates against truth.
  ErrorStats accuracy;
  /// Odometry integration alone, at the same keyframes.
  ErrorStats dead_reckoning;
  std::size_t inter_vehicle_factors = 0;
  std::size_t perception_links = 0;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  Mode mode = Mode::kFull;
  PerceptionProtocol perception = PerceptionProtocol::kSelective;
  int k_collaborators = 0;
  std::optional<std::uint64_t> perception_budget_bytes;

  std::vector<EgoReport> egos;
  ObjectErrors objects;
  std::array<std::optional<double>, 3> ap{};
  MotaResult mota_counts;
  std::optional<double> mota;
  RecallCount detection_recall;
  PlaceMetrics place;
  MatchCounts keypoints;

  std::uint64_t slam_bytes = 0;
  std::uint64_t perception_bytes = 0;
  comms::CommVol slam_commvol;
  comms::CommVol perception_commvol;
  comms::CommVol total_commvol;
  std::size_t messages_dropped = 0;
  std::size_t messages_stale = 0;

  double wall_seconds = 0.0;

  const EgoReport* ego(int vehicle) const;
  /// Mean of the per-ego RMSE values that are defined.
  std::optional<double> meanEgoRmse() const;
};

struct TrajectoryRow {
  int step = 0;
  int vehicle = 0;
  Pose2 estimate;
  Pose2 dead_reckoning;
  Pose2 truth;
};

struct TrackRow {
  int step = 0;
  int vehicle = 0;
  int track = 0;
  Pose2 in_ego;
  double v = 0.0;
  double omega = 0.0;
};

struct RunResult {
  RunReport report;
  comms::CommLedger ledger;
  std::vector<TrajectoryRow> trajectory;
  /// Final keyframe estimates per ego.
  std::vector<TrajectoryRow> keyframes;
  std::vector<TrackRow> tracks;
};

/// Executes the per-step pipeline for every step of the scenario:
///   1. truth and sensing for all vehicles (odometry, detections, confidence map,
///      place descriptor at keyframes),
///   2. phase 1 broadcasts: sequence descriptors of the egos (SLAM, keyframes only) and
///      confidence maps of all vehicles (selective perception),
///   3. phase 2 replies: best-matching sequence descriptor of each neighbor,
///   4. phase 3: local features and pose updates from the ranked collaborators, selected or
///      dense detections from perception neighbors,
///   5. RANSAC and indirect ego poses, detection fusion,
///   6. backend update and evaluation.
/// Every message is encoded, passed through the network model and decoded before use;
/// messages delivered after their sending step are counted but not used.
/// Throws std::runtime_error naming the step when the optimizer fails.
RunResult runPipeline(const RunConfig& config);

/// runPipeline, then writes the output files when config.output_dir is set.
RunReport run(const RunConfig& config);

/// Runs the configurations on up to `threads` workers; results keep the input order.
std::vector<RunResult> runAll(const std::vector<RunConfig>& configs, unsigned threads = 0);

}  // namespace cslammot::harness
