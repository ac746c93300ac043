#include "cslammot/graph/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace cslammot::graph {

Ordering makeOrdering(const FactorGraph& graph) {
  Ordering o;
  for (const auto& id : graph.variables()) {
    o.offset[id] = o.dimension;
    o.dimension += id.dim();
  }
  return o;
}

NormalEquations buildNormalEquations(const FactorGraph& graph, const Values& values, const Ordering& ordering) {
  NormalEquations ne;
  ne.gradient = Eigen::VectorXd::Zero(ordering.dimension);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < ordering.dimension; ++i) triplets.emplace_back(i, i, 0.0);
  for (const auto& f : graph.factors()) {
    const FactorLinearization lin = linearizeFactor(f, values);
    ne.cost += lin.cost;
    for (std::size_t i = 0; i < f.variables.size(); ++i) {
      const int oi = ordering.offset.at(f.variables[i]);
      const Eigen::MatrixXd& ji = lin.jacobians[i];
      if (ji.isZero(0.0)) continue;
      ne.gradient.segment(oi, ji.cols()) += ji.transpose() * lin.error;
      for (std::size_t j = 0; j < f.variables.size(); ++j) {
        const Eigen::MatrixXd& jj = lin.jacobians[j];
        if (jj.isZero(0.0)) continue;
        const int oj = ordering.offset.at(f.variables[j]);
        const Eigen::MatrixXd block = ji.transpose() * jj;
        for (int r = 0; r < block.rows(); ++r) {
          for (int c = 0; c < block.cols(); ++c) triplets.emplace_back(oi + r, oj + c, block(r, c));
        }
      }
    }
  }
  ne.hessian.resize(ordering.dimension, ordering.dimension);
  ne.hessian.setFromTriplets(triplets.begin(), triplets.end());
  return ne;
}

namespace {

Values applyStep(const Values& values, const Ordering& ordering, const Eigen::VectorXd& step) {
  Values out;
  for (const auto& [id, value] : values) {
    auto it = ordering.offset.find(id);
    if (it == ordering.offset.end()) {
      out.insert(id, value);
      continue;
    }
    out.insert(id, retract(value, step.segment(it->second, id.dim())));
  }
  return out;
}

}  // namespace

Estimate optimize(const FactorGraph& graph, const Values& initial, const OptimizerParams& params) {
  for (const auto& id : graph.variables()) {
    if (!initial.contains(id)) throw std::invalid_argument("optimize: no initial value for " + toString(id));
  }
  const Ordering ordering = makeOrdering(graph);
  Estimate est;
  est.values = initial;

  NormalEquations ne = buildNormalEquations(graph, est.values, ordering);
  est.final_cost = ne.cost;
  est.gradient_norm = ne.gradient.norm();
  if (ordering.dimension == 0 || ne.gradient.norm() == 0.0) {
    est.status = OptimizerStatus::kConverged;
    return est;
  }

  double lambda = params.initial_lambda;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  est.status = OptimizerStatus::kMaxIterations;

  while (est.iterations < params.max_iterations) {
    ++est.iterations;
    bool accepted = false;
    while (!accepted) {
      Eigen::SparseMatrix<double> damped = ne.hessian;
      for (int i = 0; i < ordering.dimension; ++i) {
        const double d = std::max(ne.hessian.coeff(i, i), 1e-6);
        damped.coeffRef(i, i) += lambda * d;
      }
      solver.compute(damped);
      bool ok = solver.info() == Eigen::Success && solver.vectorD().minCoeff() > 0.0;
      Eigen::VectorXd step;
      if (ok) {
        step = solver.solve(-ne.gradient);
        ok = step.allFinite();
      }
      if (!ok) {
        lambda *= params.lambda_increase;
        if (lambda > params.max_lambda) {
          std::ostringstream msg;
          msg << "normal equations not positive definite at lambda " << lambda << " (dimension "
              << ordering.dimension << ", cost " << ne.cost << ")";
          est.status = OptimizerStatus::kFailed;
          est.diagnostics = msg.str();
          return est;
        }
        continue;
      }

      Values candidate = applyStep(est.values, ordering, step);
      const double new_cost = graph.cost(candidate);
      bool descent = new_cost <= ne.cost;
      std::optional<NormalEquations> candidate_ne;
      if (!descent && new_cost - ne.cost <= 8.0 * std::numeric_limits<double>::epsilon() * ne.cost) {
        // Cost flat to rounding: judge the step by the gradient instead.
        candidate_ne = buildNormalEquations(graph, candidate, ordering);
        descent = candidate_ne->gradient.norm() < ne.gradient.norm();
      }
      if (descent) {
        const double change = ne.cost - new_cost;
        const double old_cost = ne.cost;
        est.values = std::move(candidate);
        ne = candidate_ne ? std::move(*candidate_ne) : buildNormalEquations(graph, est.values, ordering);
        est.final_cost = ne.cost;
        est.gradient_norm = ne.gradient.norm();
        lambda = std::max(lambda * params.lambda_decrease, params.min_lambda);
        accepted = true;
        if (change < params.absolute_cost_tolerance || change < params.relative_cost_tolerance * old_cost ||
            step.norm() < params.step_tolerance || est.gradient_norm == 0.0) {
          est.status = OptimizerStatus::kConverged;
          return est;
        }
      } else {
        lambda *= params.lambda_increase;
        if (lambda > params.max_lambda) {
          // No descent direction improves the cost: local minimum to working precision.
          est.status = OptimizerStatus::kConverged;
          return est;
        }
      }
    }
  }
  return est;
}

}  // namespace cslammot::graph
