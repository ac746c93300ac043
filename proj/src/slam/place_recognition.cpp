#include "cslammot/slam/place_recognition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cslammot/sim/sensors.hpp"

namespace cslammot::slam {

PlaceDescriptor placeDescriptor(const Pose2& vehicle, std::span<const Eigen::Vector2d> landmarks,
                                std::span<const sim::Segment2> occluders, const PlaceDescriptorParams& params,
                                int vehicle_id, int frame, Rng& rng) {
  PlaceDescriptor out;
  out.vehicle = vehicle_id;
  out.frame = frame;
  out.values = Eigen::VectorXd::Zero(params.dim);

  const auto visible = sim::visibleLandmarks(vehicle, params.range, params.fov, landmarks, occluders);
  for (int id : visible) {
    const Eigen::Vector2d rel = vehicle.transformTo(landmarks[static_cast<std::size_t>(id)]);
    const double bearing = std::atan2(rel.y(), rel.x());
    int bin = static_cast<int>(std::floor((bearing + std::numbers::pi) / (2.0 * std::numbers::pi) * params.dim));
    bin = std::clamp(bin, 0, params.dim - 1);
    out.values[bin] += 1.0 / (1.0 + rel.norm());
  }
  out.values = out.values.cwiseMin(1.0);

  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::VectorXd noise(params.dim);
  for (int i = 0; i < params.dim; ++i) noise[i] = params.noise * n01(rng);

  if (visible.empty()) {
    out.degenerate = true;
    return out;
  }
  out.values += noise;
  const double norm = out.values.norm();
  if (norm > 0.0) out.values /= norm;
  return out;
}

PlaceDescriptor sequenceDescriptor(std::span<const PlaceDescriptor> window) {
  if (window.empty()) throw std::invalid_argument("sequenceDescriptor: empty window");
  PlaceDescriptor out;
  out.values = Eigen::VectorXd::Zero(window.front().values.size());
  for (const auto& d : window) {
    if (d.values.size() != out.values.size()) throw std::invalid_argument("sequenceDescriptor: dimension mismatch");
    out.values += d.values;
  }
  out.values /= static_cast<double>(window.size());
  const double norm = out.values.norm();
  if (norm > 0.0) {
    out.values /= norm;
  } else {
    out.degenerate = true;
  }
  out.frame = window.back().frame;
  out.vehicle = window.back().vehicle;
  return out;
}

double descriptorDistance(const PlaceDescriptor& a, const PlaceDescriptor& b) {
  return (a.values - b.values).norm();
}

namespace {

bool matchLess(const PlaceMatch& a, const PlaceMatch& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
  return a.frame < b.frame;
}

}  // namespace

std::vector<PlaceMatch> rankCollaborators(const PlaceDescriptor& query, std::span<const CandidateList> candidates) {
  std::vector<PlaceMatch> best;
  for (const auto& list : candidates) {
    std::optional<PlaceMatch> top;
    for (const auto& frame : list.frames) {
      if (frame.degenerate) continue;
      PlaceMatch m{list.vehicle, frame.frame, descriptorDistance(query, frame)};
      if (!top || matchLess(m, *top)) top = m;
    }
    if (top) best.push_back(*top);
  }
  std::sort(best.begin(), best.end(), matchLess);
  return best;
}

std::optional<PlaceMatch> matchPlace(const PlaceDescriptor& query, std::span<const CandidateList> candidates,
                                     double max_distance) {
  if (query.degenerate) return std::nullopt;
  const auto ranked = rankCollaborators(query, candidates);
  if (ranked.empty() || ranked.front().distance > max_distance) return std::nullopt;
  return ranked.front();
}

}  // namespace cslammot::slam
