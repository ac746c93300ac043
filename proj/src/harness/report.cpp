#include "cslammot/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace cslammot::harness {

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json commVolJson(std::uint64_t bytes, const comms::CommVol& v) {
  return {{"bytes", bytes}, {"commvol", v.no_communication ? nlohmann::json(nullptr) : nlohmann::json(v.value)}};
}

std::ofstream openFile(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void writeRow(std::ostream& out, const TrajectoryRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                r.vehicle, r.estimate.x(), r.estimate.y(), r.estimate.yaw(), r.dead_reckoning.x(),
                r.dead_reckoning.y(), r.dead_reckoning.yaw(), r.truth.x(), r.truth.y(), r.truth.yaw());
  out << buf;
}

std::string cell(const nlohmann::json& v, int precision = 4) {
  if (v.is_null()) return "n/a";
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

}  // namespace

nlohmann::json reportToJson(const RunReport& r, bool include_timing) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["mode"] = toString(r.mode);
  j["perception_protocol"] = toString(r.perception);
  j["k_collaborators"] = r.k_collaborators;
  j["perception_budget_bytes"] =
      r.perception_budget_bytes ? nlohmann::json(*r.perception_budget_bytes) : nlohmann::json(nullptr);
  j["egos"] = nlohmann::json::array();
  for (const auto& e : r.egos) {
    j["egos"].push_back({{"vehicle", e.vehicle},
                         {"mean", opt(e.accuracy.mean)},
                         {"rmse", opt(e.accuracy.rmse)},
                         {"keyframes", e.accuracy.count},
                         {"dead_reckoning_mean", opt(e.dead_reckoning.mean)},
                         {"dead_reckoning_rmse", opt(e.dead_reckoning.rmse)},
                         {"inter_vehicle_factors", e.inter_vehicle_factors},
                         {"perception_links", e.perception_links}});
  }
  j["objects"] = {{"rmse_longitudinal", opt(r.objects.longitudinal)},
                  {"rmse_lateral", opt(r.objects.lateral)},
                  {"rmse_yaw", opt(r.objects.yaw)},
                  {"rmse_velocity", opt(r.objects.velocity)},
                  {"samples", r.objects.count}};
  j["ap"] = {{"iou_0.3", opt(r.ap[0])}, {"iou_0.5", opt(r.ap[1])}, {"iou_0.7", opt(r.ap[2])}};
  j["mota"] = {{"value", opt(r.mota)},
               {"gt", r.mota_counts.gt},
               {"fn", r.mota_counts.fn},
               {"fp", r.mota_counts.fp},
               {"id_switches", r.mota_counts.id_switches}};
  j["detection_recall"] = {
      {"value", opt(r.detection_recall.value())}, {"matched", r.detection_recall.matched}, {"gt", r.detection_recall.truth}};
  j["place_recognition"] = {
      {"recall_at_1", opt(r.place.recall_at_1)}, {"recall_at_3", opt(r.place.recall_at_3)}, {"auc", opt(r.place.auc)}};
  j["keypoint_matching"] = {{"precision", opt(r.keypoints.precision())},
                            {"recall", opt(r.keypoints.recall())},
                            {"matches", r.keypoints.matches},
                            {"correct", r.keypoints.correct}};
  j["comm"] = {{"slam", commVolJson(r.slam_bytes, r.slam_commvol)},
               {"perception", commVolJson(r.perception_bytes, r.perception_commvol)},
               {"total", commVolJson(r.slam_bytes + r.perception_bytes, r.total_commvol)},
               {"dropped_messages", r.messages_dropped},
               {"stale_messages", r.messages_stale}};
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

void writeOutputs(const std::string& dir, const RunConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  {
    auto out = openFile(root / "summary.json");
    auto j = reportToJson(result.report);
    j["scenario_path"] = config.scenario_path;
    out << j.dump(2) << '\n';
  }
  {
    auto out = openFile(root / "ledger.csv");
    result.ledger.writeCsv(out);
  }
  const char* header = "step,vehicle,est_x,est_y,est_yaw,dr_x,dr_y,dr_yaw,gt_x,gt_y,gt_yaw\n";
  {
    auto out = openFile(root / "trajectory.csv");
    out << header;
    for (const auto& r : result.trajectory) writeRow(out, r);
  }
  {
    auto out = openFile(root / "keyframes.csv");
    out << header;
    for (const auto& r : result.keyframes) writeRow(out, r);
  }
  {
    auto out = openFile(root / "tracks.csv");
    out << "step,vehicle,track,x,y,yaw,v,omega\n";
    char buf[256];
    for (const auto& t : result.tracks) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", t.step, t.vehicle, t.track,
                    t.in_ego.x(), t.in_ego.y(), t.in_ego.yaw(), t.v, t.omega);
      out << buf;
    }
  }
}

void printSummary(std::ostream& out, const nlohmann::json& s) {
  out << "scenario " << s.value("scenario", "?") << "  seed " << s.value("seed", 0) << "  mode "
      << s.value("mode", "?") << "  perception " << s.value("perception_protocol", "?") << '\n';
  out << "\nvehicle   mean      rmse      dr_rmse   ivf\n";
  for (const auto& e : s.at("egos")) {
    out << std::left << std::setw(10) << e.at("vehicle").dump() << std::setw(10) << cell(e.at("mean"))
        << std::setw(10) << cell(e.at("rmse")) << std::setw(10) << cell(e.at("dead_reckoning_rmse"))
        << e.at("inter_vehicle_factors").dump() << '\n';
  }
  const auto& o = s.at("objects");
  out << "\nobject rmse  long " << cell(o.at("rmse_longitudinal")) << "  lat " << cell(o.at("rmse_lateral"))
      << "  yaw " << cell(o.at("rmse_yaw")) << "  vel " << cell(o.at("rmse_velocity")) << '\n';
  const auto& ap = s.at("ap");
  out << "AP@0.3 " << cell(ap.at("iou_0.3")) << "  AP@0.5 " << cell(ap.at("iou_0.5")) << "  AP@0.7 "
      << cell(ap.at("iou_0.7")) << "  MOTA " << cell(s.at("mota").at("value")) << "  recall "
      << cell(s.at("detection_recall").at("value")) << '\n';
  const auto& pr = s.at("place_recognition");
  out << "Recall@1 " << cell(pr.at("recall_at_1")) << "  Recall@3 " << cell(pr.at("recall_at_3")) << "  AUC "
      << cell(pr.at("auc")) << "  keypoint P/R " << cell(s.at("keypoint_matching").at("precision")) << " / "
      << cell(s.at("keypoint_matching").at("recall")) << '\n';
  const auto& c = s.at("comm");
  out << "\nchannel      bytes        CommVol\n";
  for (const char* ch : {"slam", "perception", "total"}) {
    out << std::left << std::setw(13) << ch << std::setw(13) << c.at(ch).at("bytes").dump()
        << cell(c.at(ch).at("commvol"), 2) << '\n';
  }
  if (s.contains("wall_seconds")) out << "\nwall " << cell(s.at("wall_seconds"), 2) << " s\n";
}

}  // namespace cslammot::harness
