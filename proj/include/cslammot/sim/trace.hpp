#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cslammot/sim/sensors.hpp"

namespace cslammot::sim {

/// One line per (step, vehicle), whitespace separated, %.17g decimals:
///   step vehicle gt_x gt_y gt_yaw odom_x odom_y odom_yaw n [x y yaw length width confidence] * n
/// Detections are in the vehicle frame. Lines starting with '#' and blank lines are ignored.
struct TraceRecord {
  int step = 0;
  int vehicle = 0;
  Pose2 truth;
  Pose2 odometry;
  std::vector<Detection> detections;
};

std::string formatTraceRecord(const TraceRecord& record);
/// Throws std::invalid_argument on a malformed line.
TraceRecord parseTraceRecord(const std::string& line);

void writeTrace(std::ostream& out, const std::vector<TraceRecord>& records);
/// Throws std::invalid_argument with the offending line number.
std::vector<TraceRecord> readTrace(std::istream& in);

}  // namespace cslammot::sim
