#include "cslammot/graph/max_mixture.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace cslammot::graph {

double mixtureScore(const MixtureCandidate& c) {
  if (c.weight <= 0.0) throw std::invalid_argument("mixtureScore: weight must be positive");
  const Eigen::LLT<Eigen::MatrixXd> llt(c.information);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("mixtureScore: information is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double maha = c.residual.dot(c.information * c.residual);
  return maha - 2.0 * std::log(c.weight) - log_det;
}

MixtureSelection maxMixture(std::span<const MixtureCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("maxMixture: no candidates");
  MixtureSelection best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = mixtureScore(candidates[i]);
    if (i == 0 || score < best.score) {
      best.index = i;
      best.score = score;
    }
  }
  best.residual = candidates[best.index].residual;
  best.information = candidates[best.index].information;
  return best;
}

}  // namespace cslammot::graph
