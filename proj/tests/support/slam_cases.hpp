#pragma once

// Planted-transform correspondence sets for the relative-pose tests.

#include <algorithm>
#include <numbers>
#include <vector>

#include "cslammot/slam/ransac.hpp"
#include "support/oracles.hpp"

namespace cslammot::oracle {

struct PlantedPairs {
  Transform2 truth;
  std::vector<slam::PointPair> pairs;
};

/// `inliers` pairs related by a random transform with Gaussian noise `sigma` on the target,
/// plus `outliers` pairs with unrelated targets, shuffled.
inline PlantedPairs plantedPairs(Rng& rng, int inliers, int outliers, double sigma) {
  PlantedPairs out;
  out.truth = Transform2(uniform(rng, -std::numbers::pi, std::numbers::pi),
                         Eigen::Vector2d(uniform(rng, -20.0, 20.0), uniform(rng, -20.0, 20.0)));
  std::normal_distribution<double> noise(0.0, sigma);
  for (int i = 0; i < inliers; ++i) {
    const Eigen::Vector2d p(uniform(rng, -40.0, 40.0), uniform(rng, -40.0, 40.0));
    out.pairs.push_back({p, out.truth.apply(p) + Eigen::Vector2d(noise(rng), noise(rng))});
  }
  for (int i = 0; i < outliers; ++i) {
    out.pairs.push_back({Eigen::Vector2d(uniform(rng, -40.0, 40.0), uniform(rng, -40.0, 40.0)),
                         Eigen::Vector2d(uniform(rng, -60.0, 60.0), uniform(rng, -60.0, 60.0))});
  }
  std::shuffle(out.pairs.begin(), out.pairs.end(), rng);
  return out;
}

struct TransformError {
  double translation = 0.0;
  double rotation_deg = 0.0;
};

inline TransformError transformError(const Transform2& estimate, const Transform2& truth) {
  return {(estimate.translation - truth.translation).norm(),
          std::abs(normalizeAngle(estimate.rotation - truth.rotation)) * 180.0 / std::numbers::pi};
}

/// Seeds (out of `seeds`) where RANSAC recovers the planted transform to 0.1 m and 1 degree
/// with 30% outliers and 5 cm inlier noise.
inline int ransacRecoveries(int seeds) {
  int good = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng = makeRng(static_cast<std::uint64_t>(seed), {0x7a11});
    const auto planted = plantedPairs(rng, 70, 30, 0.05);
    const auto outcome = slam::ransacTransform(planted.pairs, slam::RansacParams{}, rng);
    if (!outcome.ok()) continue;
    const auto err = transformError(outcome.result->delta_t, planted.truth);
    if (err.translation < 0.1 && err.rotation_deg < 1.0) ++good;
  }
  return good;
}

}  // namespace cslammot::oracle
