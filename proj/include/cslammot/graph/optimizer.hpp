#pragma once

#include <map>
#include <string>

#include <Eigen/SparseCore>

#include "cslammot/graph/factor_graph.hpp"

namespace cslammot::graph {

struct OptimizerParams {
  int max_iterations = 100;
  double absolute_cost_tolerance = 1e-9;
  double relative_cost_tolerance = 1e-12;
  double step_tolerance = 1e-9;
  double initial_lambda = 1e-5;
  double lambda_increase = 10.0;
  double lambda_decrease = 0.1;
  double min_lambda = 1e-12;
  double max_lambda = 1e10;
};

enum class OptimizerStatus { kConverged, kMaxIterations, kFailed };

struct Estimate {
  Values values;
  double final_cost = 0.0;
  int iterations = 0;
  OptimizerStatus status = OptimizerStatus::kConverged;
  double gradient_norm = 0.0;
  std::string diagnostics;
};

/// Column offset of each variable in the stacked tangent vector, in VariableId order.
struct Ordering {
  std::map<VariableId, int> offset;
  int dimension = 0;
};
Ordering makeOrdering(const FactorGraph& graph);

/// Gauss-Newton system H = J'J, g = J'r over whitened factors, with mixture components
/// selected at `values`.
struct NormalEquations {
  Eigen::SparseMatrix<double> hessian;
  Eigen::VectorXd gradient;
  double cost = 0.0;
};
NormalEquations buildNormalEquations(const FactorGraph& graph, const Values& values, const Ordering& ordering);

/// Levenberg-Marquardt on the sum of squared whitened residuals, re-selecting mixture
/// components at every evaluation. Throws std::invalid_argument when a variable lacks an
/// initial value; numerical failure is reported through Estimate::status.
Estimate optimize(const FactorGraph& graph, const Values& initial, const OptimizerParams& params = {});

}  // namespace cslammot::graph
