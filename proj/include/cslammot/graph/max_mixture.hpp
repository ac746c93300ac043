#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace cslammot::graph {

/// One mixture component already evaluated at the current estimate.
struct MixtureCandidate {
  double weight = 1.0;
  Eigen::VectorXd residual;
  Eigen::MatrixXd information;
};

struct MixtureSelection {
  std::size_t index = 0;
  Eigen::VectorXd residual;
  Eigen::MatrixXd information;
  double score = 0.0;
};

/// Negative log-likelihood of one component up to a shared constant:
/// r' Omega r - 2 ln w - ln det Omega.
double mixtureScore(const MixtureCandidate& c);

/// Component with the lowest score; ties go to the lowest index. Throws on an empty list.
MixtureSelection maxMixture(std::span<const MixtureCandidate> candidates);

}  // namespace cslammot::graph
