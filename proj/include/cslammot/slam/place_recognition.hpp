#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cslammot/geometry.hpp"
#include "cslammot/rng.hpp"
#include "cslammot/sim/scenario.hpp"

namespace cslammot::slam {

struct PlaceDescriptor {
  Eigen::VectorXd values;
  int frame = -1;
  int vehicle = -1;
  /// Set when no landmark contributed (the histogram was all zero).
  bool degenerate = false;
};

struct PlaceDescriptorParams {
  int dim = 64;
  double range = 40.0;
  double fov = 2.0 * 3.14159265358979323846;
  double noise = 0.01;
};

/// Bearing histogram of visible landmarks: each of `dim` sectors accumulates
/// 1 / (1 + range) clamped to 1, then Gaussian noise is added and the vector is
/// L2-normalized.
PlaceDescriptor placeDescriptor(const Pose2& vehicle, std::span<const Eigen::Vector2d> landmarks,
                                std::span<const sim::Segment2> occluders, const PlaceDescriptorParams& params,
                                int vehicle_id, int frame, Rng& rng);

/// Elementwise mean of the window, L2-normalized. Throws on an empty window.
PlaceDescriptor sequenceDescriptor(std::span<const PlaceDescriptor> window);

double descriptorDistance(const PlaceDescriptor& a, const PlaceDescriptor& b);

struct PlaceMatch {
  int vehicle = -1;
  int frame = -1;
  double distance = 0.0;
};

/// Stored frames offered by one neighbor.
struct CandidateList {
  int vehicle = -1;
  std::vector<PlaceDescriptor> frames;
};

/// Best frame of each neighbor, ordered by (distance, vehicle, frame).
std::vector<PlaceMatch> rankCollaborators(const PlaceDescriptor& query, std::span<const CandidateList> candidates);

/// Global argmin over all candidate frames, gated by `max_distance`.
std::optional<PlaceMatch> matchPlace(const PlaceDescriptor& query, std::span<const CandidateList> candidates,
                                     double max_distance);

}  // namespace cslammot::slam
