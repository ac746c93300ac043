#include "cslammot/sim/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cslammot::sim {

namespace {

void append(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), " %.17g", v);
  out += buf;
}

}  // namespace

std::string formatTraceRecord(const TraceRecord& r) {
  std::string out = std::to_string(r.step) + " " + std::to_string(r.vehicle);
  for (double v : {r.truth.x(), r.truth.y(), r.truth.yaw(), r.odometry.x(), r.odometry.y(), r.odometry.yaw()}) {
    append(out, v);
  }
  out += " " + std::to_string(r.detections.size());
  for (const auto& d : r.detections) {
    for (double v : {d.pose_in_vehicle.x(), d.pose_in_vehicle.y(), d.pose_in_vehicle.yaw(), d.length, d.width,
                     d.confidence}) {
      append(out, v);
    }
  }
  return out;
}

TraceRecord parseTraceRecord(const std::string& line) {
  std::istringstream in(line);
  TraceRecord r;
  double g[3];
  double o[3];
  std::size_t n = 0;
  if (!(in >> r.step >> r.vehicle >> g[0] >> g[1] >> g[2] >> o[0] >> o[1] >> o[2] >> n)) {
    throw std::invalid_argument("trace: truncated record header");
  }
  if (r.step < 0 || r.vehicle < 0) throw std::invalid_argument("trace: negative step or vehicle id");
  r.truth = Pose2(g[0], g[1], g[2]);
  r.odometry = Pose2(o[0], o[1], o[2]);
  r.detections.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x, y, yaw;
    Detection d;
    if (!(in >> x >> y >> yaw >> d.length >> d.width >> d.confidence)) {
      throw std::invalid_argument("trace: truncated detection list");
    }
    if (!(d.length > 0.0) || !(d.width > 0.0) || d.confidence < 0.0 || d.confidence > 1.0) {
      throw std::invalid_argument("trace: detection extent or confidence out of range");
    }
    d.pose_in_vehicle = Pose2(x, y, yaw);
    d.stamp = r.step;
    d.source_vehicle = r.vehicle;
    r.detections.push_back(d);
  }
  std::string rest;
  if (in >> rest) throw std::invalid_argument("trace: trailing fields");
  return r;
}

void writeTrace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << "# step vehicle gt_x gt_y gt_yaw odom_x odom_y odom_yaw n [x y yaw length width confidence]*n\n";
  for (const auto& r : records) out << formatTraceRecord(r) << '\n';
}

std::vector<TraceRecord> readTrace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(parseTraceRecord(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cslammot::sim
