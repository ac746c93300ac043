#include "cslammot/slam/ransac.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>

namespace cslammot::slam {

Transform2 fitRigid(std::span<const PointPair> pairs, std::span<const int> subset) {
  std::vector<int> all;
  if (subset.empty()) {
    all.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) all[i] = static_cast<int>(i);
    subset = all;
  }
  Eigen::Vector2d src_mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d dst_mean = Eigen::Vector2d::Zero();
  for (int i : subset) {
    src_mean += pairs[static_cast<std::size_t>(i)].source;
    dst_mean += pairs[static_cast<std::size_t>(i)].target;
  }
  src_mean /= static_cast<double>(subset.size());
  dst_mean /= static_cast<double>(subset.size());

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (int i : subset) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    cov += (p.source - src_mean) * (p.target - dst_mean).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d fix = Eigen::Matrix2d::Identity();
  fix(1, 1) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix2d rot = svd.matrixV() * fix * svd.matrixU().transpose();
  const double angle = std::atan2(rot(1, 0), rot(0, 0));
  return Transform2(angle, dst_mean - rot * src_mean);
}

std::vector<int> inliersOf(const Transform2& t, std::span<const PointPair> pairs, double tol) {
  std::vector<int> idx;
  const Eigen::Matrix2d r = t.rotationMatrix();
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Vector2d res = r * pairs[i].source + t.translation - pairs[i].target;
    if (res.squaredNorm() <= tol2) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

Eigen::Matrix3d transformCovariance(const Transform2& t, std::span<const PointPair> pairs,
                                    std::span<const int> subset) {
  const Eigen::Matrix2d r = t.rotationMatrix();
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  double sq = 0.0;
  for (int i : subset) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    const Eigen::Vector2d rs = r * p.source;
    Eigen::Matrix<double, 2, 3> j;
    j << 1.0, 0.0, -rs.y(),
         0.0, 1.0, rs.x();
    jtj += j.transpose() * j;
    sq += (rs + t.translation - p.target).squaredNorm();
  }
  const double dof = std::max(1.0, 2.0 * static_cast<double>(subset.size()) - 3.0);
  const double sigma2 = std::max(sq / dof, 1e-12);
  return sigma2 * jtj.ldlt().solve(Eigen::Matrix3d::Identity());
}

RansacOutcome ransacTransform(std::span<const PointPair> pairs, const RansacParams& params, Rng& rng) {
  RansacOutcome out;
  if (pairs.size() < 2) {
    out.status = RansacStatus::kTooFewMatches;
    return out;
  }

  const int n = static_cast<int>(pairs.size());
  std::uniform_int_distribution<int> pick(0, n - 1);
  Transform2 best;
  int best_score = -1;
  for (int it = 0; it < params.iterations; ++it) {
    const int a = pick(rng);
    int b = pick(rng);
    if (n == 2) {
      b = 1 - a;
    } else {
      while (b == a) b = pick(rng);
    }
    if ((pairs[static_cast<std::size_t>(a)].source - pairs[static_cast<std::size_t>(b)].source).norm() < 1e-9) continue;
    const int sample[2] = {a, b};
    const Transform2 hyp = fitRigid(pairs, sample);
    const int score = static_cast<int>(inliersOf(hyp, pairs, params.inlier_tol).size());
    if (params.record_scores) out.hypothesis_scores.push_back(score);
    if (score > best_score) {
      best_score = score;
      best = hyp;
    }
  }
  out.best_score = std::max(best_score, 0);
  if (best_score < params.min_inliers || best_score < 2) {
    out.status = RansacStatus::kTooFewInliers;
    return out;
  }

  // Refine on the consensus set; keep a refinement only if it does not lose support.
  Transform2 final_t = best;
  std::vector<int> inliers = inliersOf(best, pairs, params.inlier_tol);
  for (int round = 0; round < 3; ++round) {
    const Transform2 refined = fitRigid(pairs, inliers);
    std::vector<int> refined_inliers = inliersOf(refined, pairs, params.inlier_tol);
    if (refined_inliers.size() < inliers.size()) break;
    const bool same = refined_inliers == inliers;
    final_t = refined;
    inliers = std::move(refined_inliers);
    if (same) break;
  }

  RelPoseResult res;
  res.delta_t = final_t;
  res.inlier_count = static_cast<int>(inliers.size());
  res.inlier_ratio = static_cast<double>(inliers.size()) / static_cast<double>(n);
  res.covariance = transformCovariance(final_t, pairs, inliers);
  res.inliers = std::move(inliers);
  out.status = RansacStatus::kOk;
  out.result = std::move(res);
  return out;
}

}  // namespace cslammot::slam
