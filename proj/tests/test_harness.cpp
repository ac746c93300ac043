#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cslammot/harness/metrics.hpp"
#include "cslammot/harness/replay.hpp"
#include "cslammot/harness/report.hpp"
#include "cslammot/harness/sensing.hpp"
#include "cslammot/harness/sweep.hpp"
#include "support/metric_cases.hpp"
#include "support/pipeline_cases.hpp"

using namespace cslammot;
using namespace cslammot::harness;

TEST_CASE("metric toy cases match hand-computed values exactly") {
  for (const auto& c : oracle::metricToyCases()) {
    CAPTURE(c.name);
    REQUIRE(c.value.has_value());
    CHECK(*c.value == c.expected);
  }
}

TEST_CASE("metrics are unset without data") {
  CHECK_FALSE(apAtIou({{}}, {{}}, 0.5).has_value());
  CHECK_FALSE(errorStats(std::vector<double>{}).rmse.has_value());
  CHECK_FALSE(placeRecognitionMetrics(std::vector<PlaceQuery>{}).recall_at_1.has_value());
  CHECK_FALSE(mota({}, {}).value().has_value());
  CHECK_FALSE(MatchCounts{}.precision().has_value());
}

TEST_CASE("ego accuracy uses only shared steps") {
  const std::map<int, Pose2> est = {{0, Pose2(0, 0, 0)}, {2, Pose2(3, 4, 0)}, {4, Pose2(9, 9, 0)}};
  const std::map<int, Pose2> truth = {{0, Pose2(0, 0, 0)}, {2, Pose2(0, 0, 0)}};
  const auto s = egoAccuracy(est, truth);
  CHECK(s.count == 2);
  CHECK(*s.mean == 2.5);
  CHECK(*s.rmse == std::sqrt(12.5));
}

TEST_CASE("object errors are expressed in the truth heading frame") {
  const std::vector<ObjectSample> samples = {
      {Pose2(0, 0, 0), 5.0, Pose2(1, 2, 0.1), 6.0},
      {Pose2(0, 0, std::numbers::pi / 2.0), 5.0, Pose2(-2, 1, std::numbers::pi / 2.0 - 0.1), 8.0},
  };
  const auto e = objectRmse(samples);
  CHECK(*e.longitudinal == doctest::Approx(1.0));
  CHECK(*e.lateral == doctest::Approx(2.0));
  CHECK(*e.yaw == doctest::Approx(0.1));
  CHECK(*e.velocity == doctest::Approx(std::sqrt(5.0)));
  CHECK_FALSE(objectRmse(std::span(samples).first(1)).longitudinal.has_value());
}

TEST_CASE("match counts accumulate") {
  MatchCounts a{10, 8, 20};
  a += MatchCounts{10, 10, 20};
  CHECK(*a.precision() == 0.9);
  CHECK(*a.recall() == 0.45);
}

TEST_CASE("mode and protocol parsing") {
  for (Mode m : {Mode::kSingleVehicle, Mode::kCoopSlamOnly, Mode::kCoopPerceptionOnly, Mode::kFull}) {
    CHECK((parseMode(toString(m)) == m));
  }
  CHECK((parsePerceptionProtocol("full_broadcast") == PerceptionProtocol::kFullBroadcast));
  CHECK_THROWS(parseMode("turbo"));
  CHECK(usesSlamChannel(Mode::kFull));
  CHECK_FALSE(usesSlamChannel(Mode::kCoopPerceptionOnly));
  CHECK(usesPerceptionChannel(Mode::kCoopPerceptionOnly));
  CHECK_FALSE(usesPerceptionChannel(Mode::kSingleVehicle));
}

TEST_CASE("shipped configurations load and validate") {
  const auto std_cfg = loadRunConfig(oracle::configPath("standard_occlusion.yaml"));
  CHECK((std_cfg.mode == Mode::kFull));
  CHECK(std_cfg.selection.k_collaborators == 1);
  CHECK(std_cfg.scenario.vehicles.size() == 4);
  CHECK(std_cfg.egoList().size() == 4);
  const auto cc = loadRunConfig(oracle::configPath("collaborator_count.yaml"));
  CHECK((cc.mode == Mode::kCoopSlamOnly));
  CHECK(cc.egoList() == std::vector<int>{0});
}

TEST_CASE("configuration errors are reported") {
  CHECK_THROWS_AS(runConfigFromYaml(YAML::Load("run: {}")), std::invalid_argument);
  CHECK_THROWS_AS(runConfigFromYaml(YAML::Load("scenario: {builtin: standard_occlusion}\nrun: {selection: {k_collaborators: -1}}")),
                  std::invalid_argument);
  CHECK_THROWS_AS(runConfigFromYaml(YAML::Load("scenario: {builtin: standard_occlusion}\nrun: {egos: [7]}")),
                  std::invalid_argument);
  CHECK_THROWS_AS(loadRunConfig("/nonexistent.yaml"), std::invalid_argument);
}

TEST_CASE("withSeed regenerates seed-dependent content") {
  const auto base = loadRunConfig(oracle::configPath("standard_occlusion.yaml"));
  const auto other = withSeed(base, 7);
  CHECK(other.seed == 7);
  CHECK(other.scenario.seed == 7);
  CHECK(other.scenario.landmarks != base.scenario.landmarks);
  CHECK(withSeed(base, 1).scenario.landmarks == base.scenario.landmarks);
}

TEST_CASE("identical confidence maps send no detections") {
  const auto result = runPipeline(oracle::identicalMapsConfig());
  CHECK(oracle::ledgerCount(result.ledger, comms::MessageKind::kSelectedDetections) == 0);
  CHECK(oracle::ledgerCount(result.ledger, comms::MessageKind::kConfidenceMap) > 0);
  std::uint64_t maps = 0;
  for (const auto& e : result.ledger.entries()) {
    if (e.kind == comms::MessageKind::kConfidenceMap) maps += e.bytes;
  }
  CHECK(result.report.perception_bytes == maps);
  CHECK(result.report.slam_bytes == 0);
}

TEST_CASE("single-vehicle mode sends nothing") {
  const auto r = runPipeline(oracle::shortStandardConfig(20, Mode::kSingleVehicle));
  CHECK(r.ledger.entries().empty());
  CHECK(r.report.total_commvol.no_communication);
  REQUIRE(r.report.ego(0) != nullptr);
  CHECK(r.report.ego(0)->inter_vehicle_factors == 0);
}

TEST_CASE("channel usage follows the mode") {
  const auto slam = runPipeline(oracle::shortStandardConfig(20, Mode::kCoopSlamOnly));
  CHECK(slam.report.perception_bytes == 0);
  CHECK(slam.report.slam_bytes > 0);
  const auto perc = runPipeline(oracle::shortStandardConfig(20, Mode::kCoopPerceptionOnly));
  CHECK(perc.report.slam_bytes == 0);
  CHECK(perc.report.perception_bytes > 0);
}

TEST_CASE("runs are deterministic and independent of worker count") {
  const auto cfg = oracle::shortStandardConfig(30);
  const auto a = runPipeline(cfg);
  const auto b = runAll({cfg, oracle::shortStandardConfig(30, Mode::kSingleVehicle)}, 2);
  CHECK(reportToJson(a.report, false) == reportToJson(b[0].report, false));
  REQUIRE(a.trajectory.size() == b[0].trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].estimate.vector() == b[0].trajectory[i].estimate.vector());
  }
  CHECK(a.ledger.total() == b[0].ledger.total());
  CHECK((b[1].report.mode == Mode::kSingleVehicle));
}

TEST_CASE("collaborator sweep at k = 0 equals a single-vehicle run") {
  auto cfg = loadRunConfig(oracle::configPath("collaborator_count.yaml"));
  cfg.scenario.duration_steps = 30;
  const auto rows = sweepCollaborators(cfg, 1, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].k == 0);
  CHECK(rows[0].report.slam_bytes == 0);
  auto single = cfg;
  single.mode = Mode::kSingleVehicle;
  const auto s = runPipeline(single);
  CHECK(*rows[0].report.meanEgoRmse() == *s.report.meanEgoRmse());
  CHECK(rows[1].report.slam_bytes > 0);
  std::ostringstream csv;
  writeCollaboratorCsv(csv, rows);
  CHECK(csv.str().rfind("k,ego_rmse,slam_bytes,slam_commvol,inter_vehicle_factors", 0) == 0);
}

TEST_CASE("budget sweep caps perception traffic") {
  auto cfg = oracle::shortStandardConfig(20, Mode::kCoopPerceptionOnly);
  const auto rows = sweepBudget(cfg, {std::nullopt, 16 + 28, 0}, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].report.perception_bytes >= rows[1].report.perception_bytes);
  CHECK(rows[1].report.perception_bytes >= rows[2].report.perception_bytes);
  std::ostringstream csv;
  writeBudgetCsv(csv, rows);
  CHECK(csv.str().find("inf") != std::string::npos);
}

TEST_CASE("recorded traces replay through the single-vehicle estimator") {
  auto s = sim::standardOcclusion(2);
  s.duration_steps = 30;
  const auto records = recordTrace(s);
  CHECK(records.size() == 30 * s.vehicles.size());
  graph::BackendParams params;
  params.dt = s.dt;
  params.keyframe_stride = s.keyframe_stride;
  const auto out = replayTrace(records, params);
  REQUIRE(out.size() == s.vehicles.size());
  for (const auto& v : out) {
    CHECK(v.steps == 30);
    CHECK(v.accuracy.rmse.has_value());
    CHECK(*v.accuracy.rmse < 1.0);
  }
  auto gap = records;
  gap.erase(gap.begin() + 8);
  CHECK_THROWS_AS(replayTrace(gap, params), std::invalid_argument);
}

TEST_CASE("run writes every output file") {
  auto cfg = oracle::shortStandardConfig(10);
  const auto dir = std::filesystem::temp_directory_path() / "cslammot_outputs_test";
  std::filesystem::remove_all(dir);
  cfg.output_dir = dir.string();
  const auto report = run(cfg);
  for (const char* f : {"summary.json", "ledger.csv", "trajectory.csv", "keyframes.csv", "tracks.csv"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "summary.json");
  const auto summary = nlohmann::json::parse(in);
  CHECK(summary["seed"] == 1);
  std::ostringstream table;
  printSummary(table, summary);
  CHECK_FALSE(table.str().empty());
  CHECK(report.wall_seconds >= 0.0);
  std::filesystem::remove_all(dir);
}
