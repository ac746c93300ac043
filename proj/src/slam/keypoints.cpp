#include "cslammot/slam/keypoints.hpp"

#include <limits>

#include "cslammot/sim/sensors.hpp"

namespace cslammot::slam {

std::vector<Eigen::VectorXd> landmarkDescriptors(std::size_t count, int dim, std::uint64_t seed) {
  Rng rng = makeRng(seed, {0x6b657970ULL});
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd d(dim);
    for (int k = 0; k < dim; ++k) d[k] = n01(rng);
    out.push_back(d.normalized());
  }
  return out;
}

KeypointSet extractKeypoints(const Pose2& vehicle, std::span<const Eigen::Vector2d> landmarks,
                             std::span<const sim::Segment2> occluders,
                             std::span<const Eigen::VectorXd> landmark_descriptors, const KeypointParams& params,
                             int vehicle_id, int frame, Rng& rng) {
  KeypointSet set;
  set.frame = frame;
  set.vehicle = vehicle_id;
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int id : sim::visibleLandmarks(vehicle, params.range, params.fov, landmarks, occluders)) {
    const auto idx = static_cast<std::size_t>(id);
    Keypoint kp;
    kp.landmark = id;
    kp.position = vehicle.transformTo(landmarks[idx]);
    kp.position.x() += params.position_noise * n01(rng);
    kp.position.y() += params.position_noise * n01(rng);
    kp.descriptor = landmark_descriptors[idx];
    for (int k = 0; k < kp.descriptor.size(); ++k) kp.descriptor[k] += params.descriptor_noise * n01(rng);
    set.points.push_back(std::move(kp));
  }
  return set;
}

namespace {

struct Nearest {
  int index = -1;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

Nearest nearestIn(const Eigen::VectorXd& d, const std::vector<Keypoint>& pool) {
  Nearest n;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double dist = (pool[j].descriptor - d).norm();
    if (dist < n.best) {
      n.second = n.best;
      n.best = dist;
      n.index = static_cast<int>(j);
    } else if (dist < n.second) {
      n.second = dist;
    }
  }
  return n;
}

}  // namespace

std::vector<IndexPair> matchKeypoints(const KeypointSet& query, const KeypointSet& candidate, double ratio) {
  std::vector<IndexPair> pairs;
  if (query.points.empty() || candidate.points.empty()) return pairs;

  std::vector<int> reverse(candidate.points.size(), -1);
  for (std::size_t j = 0; j < candidate.points.size(); ++j) {
    reverse[j] = nearestIn(candidate.points[j].descriptor, query.points).index;
  }
  for (std::size_t i = 0; i < query.points.size(); ++i) {
    const Nearest n = nearestIn(query.points[i].descriptor, candidate.points);
    if (n.index < 0) continue;
    if (std::isfinite(n.second) && !(n.best < ratio * n.second)) continue;
    if (reverse[static_cast<std::size_t>(n.index)] != static_cast<int>(i)) continue;
    pairs.push_back({static_cast<int>(i), n.index});
  }
  return pairs;
}

}  // namespace cslammot::slam
