#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cslammot/geometry.hpp"
#include "cslammot/rng.hpp"

namespace cslammot::slam {

/// A putative correspondence; the sought transform maps `source` onto `target`.
struct PointPair {
  Eigen::Vector2d source;
  Eigen::Vector2d target;
};

struct RansacParams {
  int iterations = 200;
  double inlier_tol = 0.2;  ///< meters
  int min_inliers = 5;
  /// Keep every hypothesis score in the outcome (diagnostics).
  bool record_scores = false;
};

struct RelPoseResult {
  Transform2 delta_t;
  int inlier_count = 0;
  double inlier_ratio = 0.0;
  /// Covariance of (tx, ty, rotation).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
  std::vector<int> inliers;
};

enum class RansacStatus { kOk, kTooFewMatches, kTooFewInliers };

struct RansacOutcome {
  RansacStatus status = RansacStatus::kTooFewMatches;
  std::optional<RelPoseResult> result;
  int best_score = 0;
  std::vector<int> hypothesis_scores;

  bool ok() const { return status == RansacStatus::kOk; }
};

/// Least-squares rigid transform (SVD) over the selected pairs; all pairs when `subset` is empty.
Transform2 fitRigid(std::span<const PointPair> pairs, std::span<const int> subset = {});

/// Indices of pairs whose residual under `t` is within `tol`.
std::vector<int> inliersOf(const Transform2& t, std::span<const PointPair> pairs, double tol);

/// sigma^2 (J^T J)^-1 over the given pairs, sigma^2 from the residuals.
Eigen::Matrix3d transformCovariance(const Transform2& t, std::span<const PointPair> pairs, std::span<const int> subset);

/// Two-point RANSAC with inlier-count scoring and least-squares refinement of the winner.
RansacOutcome ransacTransform(std::span<const PointPair> pairs, const RansacParams& params, Rng& rng);

}  // namespace cslammot::slam
