#include "cslammot/sim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cslammot::sim {

namespace {

// sin(h) / h, with the series near zero.
double sinc(double h) {
  if (std::abs(h) < 1e-4) return 1.0 - h * h / 6.0;
  return std::sin(h) / h;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segmentsIntersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                       const Eigen::Vector2d& q2) {
  const Eigen::Vector2d r = p2 - p1;
  const Eigen::Vector2d s = q2 - q1;
  const double denom = cross(r, s);
  const Eigen::Vector2d qp = q1 - p1;
  if (std::abs(denom) < 1e-15) return false;  // parallel: treated as not blocking
  const double t = cross(qp, s) / denom;
  const double u = cross(qp, r) / denom;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool inFov(const Eigen::Vector2d& rel, double fov) {
  if (fov >= 2.0 * std::numbers::pi) return true;
  return std::abs(std::atan2(rel.y(), rel.x())) <= 0.5 * fov;
}

}  // namespace

ObjectState stepCtrv(const ObjectState& s, double dt) {
  ObjectState out = s;
  const double yaw = s.pose.yaw();
  // Chord form of the arc: displacement = v dt sinc(w dt / 2) along the mid-arc heading.
  // Below the threshold the chord factor is taken as 1; heading and yaw still follow omega.
  const double half = 0.5 * s.omega * dt;
  const double chord = std::abs(s.omega) < kCtrvStraightThreshold ? s.v * dt : s.v * dt * sinc(half);
  out.pose = Pose2(s.pose.x() + chord * std::cos(yaw + half), s.pose.y() + chord * std::sin(yaw + half),
                   yaw + s.omega * dt);
  return out;
}

Pose2 generateOdometry(const Pose2& true_between, const SensorModel& model, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double a = n01(rng);
  const double b = n01(rng);
  const double c = n01(rng);
  return {true_between.x() + model.odom_noise.longitudinal * a, true_between.y() + model.odom_noise.lateral * b,
          true_between.yaw() + model.odom_noise.yaw * c};
}

bool lineOfSightBlocked(const Eigen::Vector2d& a, const Eigen::Vector2d& b, std::span<const Segment2> occluders) {
  for (const auto& seg : occluders) {
    if (segmentsIntersect(a, b, seg.a, seg.b)) return true;
  }
  return false;
}

std::vector<int> visibleObjects(const Pose2& vehicle, const SensorModel& sensor,
                                std::span<const ObjectState> objects, std::span<const Segment2> occluders) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Eigen::Vector2d center = objects[i].pose.translation();
    const Eigen::Vector2d rel = vehicle.transformTo(center);
    if (rel.norm() > sensor.max_range) continue;
    if (!inFov(rel, sensor.fov)) continue;
    if (lineOfSightBlocked(vehicle.translation(), center, occluders)) continue;
    ids.push_back(static_cast<int>(i));
  }
  return ids;
}

std::vector<int> visibleLandmarks(const Pose2& vehicle, double range, double fov,
                                  std::span<const Eigen::Vector2d> landmarks,
                                  std::span<const Segment2> occluders) {
  std::vector<int> ids;
  const double range2 = range * range;
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const Eigen::Vector2d d = landmarks[i] - vehicle.translation();
    if (d.squaredNorm() > range2) continue;
    if (!inFov(vehicle.transformTo(landmarks[i]), fov)) continue;
    if (lineOfSightBlocked(vehicle.translation(), landmarks[i], occluders)) continue;
    ids.push_back(static_cast<int>(i));
  }
  return ids;
}

double rangeConfidence(double range, double max_range) {
  return std::clamp(1.0 - range / max_range, 0.05, 1.0);
}

std::vector<Detection> detectObjects(const Pose2& vehicle, std::span<const int> visible_ids,
                                     std::span<const ObjectState> objects,
                                     std::span<const ObjectExtent> extents, std::span<const int> truth_ids,
                                     const SensorModel& model, int stamp, int vehicle_id, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Detection> out;
  for (int id : visible_ids) {
    const auto idx = static_cast<std::size_t>(id);
    const double keep = u01(rng);
    const double nl = n01(rng);
    const double nt = n01(rng);
    const double ny = n01(rng);
    if (keep >= model.detect_prob_visible) continue;
    const Pose2 rel = between(vehicle, objects[idx].pose);
    const Pose2 noise(model.detection_noise.longitudinal * nl, model.detection_noise.lateral * nt,
                      model.detection_noise.yaw * ny);
    Detection d;
    d.pose_in_vehicle = compose(rel, noise);
    d.length = extents[idx].length;
    d.width = extents[idx].width;
    d.confidence = rangeConfidence(rel.translation().norm(), model.max_range);
    d.stamp = stamp;
    d.source_vehicle = vehicle_id;
    d.truth_id = truth_ids[idx];
    out.push_back(d);
  }
  if (model.false_positive_rate > 0.0) {
    std::poisson_distribution<int> count_dist(model.false_positive_rate);
    const int count = count_dist(rng);
    const double half_fov = std::min(model.fov, 2.0 * std::numbers::pi) * 0.5;
    for (int i = 0; i < count; ++i) {
      const double r = model.max_range * std::sqrt(u01(rng));
      const double bearing = -half_fov + 2.0 * half_fov * u01(rng);
      const double yaw = -std::numbers::pi + 2.0 * std::numbers::pi * u01(rng);
      Detection d;
      d.pose_in_vehicle = Pose2(r * std::cos(bearing), r * std::sin(bearing), yaw);
      d.confidence = 0.05 + 0.35 * u01(rng);
      d.stamp = stamp;
      d.source_vehicle = vehicle_id;
      d.truth_id = -1;
      out.push_back(d);
    }
  }
  return out;
}

perception::ConfidenceMap confidenceMap(int vehicle_id, int stamp, std::span<const Detection> detections,
                                        const perception::GridSpec& grid) {
  perception::ConfidenceMap map(grid, vehicle_id, stamp);
  const double sigma = grid.kernel_sigma;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  // exp(-d^2 / 2 sigma^2) >= 1e-4  <=>  d <= sigma * sqrt(2 ln 1e4)
  const double radius = sigma * std::sqrt(2.0 * std::log(1e4));
  for (const auto& det : detections) {
    const double conf = std::clamp(det.confidence, 0.0, 1.0);
    if (conf <= 0.0) continue;
    const Eigen::Vector2d center = det.pose_in_vehicle.translation();
    const Eigen::Vector2d g = grid.origin.transformTo(center);
    const int c0 = std::max(0, static_cast<int>(std::floor((g.x() - radius) / grid.resolution)));
    const int c1 = std::min(grid.width - 1, static_cast<int>(std::floor((g.x() + radius) / grid.resolution)));
    const int r0 = std::max(0, static_cast<int>(std::floor((g.y() - radius) / grid.resolution)));
    const int r1 = std::min(grid.height - 1, static_cast<int>(std::floor((g.y() + radius) / grid.resolution)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double d2 = (grid.cellCenter(r, c) - center).squaredNorm();
        const double k = std::exp(-d2 * inv_two_sigma2);
        if (k < 1e-4) continue;
        double& cell = map.at(r, c);
        cell = std::max(cell, conf * k);
      }
    }
  }
  return map;
}

}  // namespace cslammot::sim
