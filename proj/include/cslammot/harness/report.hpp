#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cslammot/harness/pipeline.hpp"

namespace cslammot::harness {

/// Structured summary; undefined metrics are null. Wall-clock time is omitted unless requested
/// so that repeated runs compare equal.
nlohmann::json reportToJson(const RunReport& report, bool include_timing = true);

/// Files written into `dir` (created if missing):
///   summary.json      reportToJson
///   ledger.csv        step,sender,receiver,kind,bytes,channel
///   trajectory.csv    step,vehicle,est_x,est_y,est_yaw,dr_x,dr_y,dr_yaw,gt_x,gt_y,gt_yaw (online)
///   keyframes.csv     same columns, final smoothed keyframe estimates
///   tracks.csv        step,vehicle,track,x,y,yaw,v,omega (ego frame)
void writeOutputs(const std::string& dir, const RunConfig& config, const RunResult& result);

/// Human-readable table of a summary.json document.
void printSummary(std::ostream& out, const nlohmann::json& summary);

}  // namespace cslammot::harness
