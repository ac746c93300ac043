#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "cslammot/geometry.hpp"
#include "cslammot/graph/factor_graph.hpp"
#include "cslammot/graph/max_mixture.hpp"
#include "cslammot/rng.hpp"
#include "cslammot/sim/sensors.hpp"

namespace cslammot::oracle {

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Pose2 randomPose(Rng& rng, double extent = 10.0) {
  return {uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -3.1, 3.1)};
}

inline Eigen::MatrixXd randomSpd(Rng& rng, int n, double lo = 0.5, double hi = 4.0) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  Eigen::MatrixXd m = 0.3 * a * a.transpose();
  for (int i = 0; i < n; ++i) m(i, i) += uniform(rng, lo, hi);
  return m;
}

/// Residual difference with the yaw entry of pose residuals wrapped.
inline Eigen::VectorXd residualDelta(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd d = a - b;
  if (d.size() == 3) d(2) = normalizeAngle(d(2));
  return d;
}

/// Central differences of the factor's unwhitened residual w.r.t. variable `which`.
inline Eigen::MatrixXd numericJacobian(const graph::Factor& factor, const graph::Values& values, std::size_t which,
                                       double step = 1e-6) {
  const auto& id = factor.variables[which];
  const graph::Value base = values.at(id);
  const int dim = id.dim();
  const int rows = factor.residualDim();
  Eigen::MatrixXd j(rows, dim);
  for (int c = 0; c < dim; ++c) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(dim);
    delta(c) = step;
    graph::Values plus = values;
    graph::Values minus = values;
    plus.update(id, graph::retract(base, delta));
    minus.update(id, graph::retract(base, -delta));
    j.col(c) = residualDelta(graph::factorResidual(factor, plus), graph::factorResidual(factor, minus)) / (2.0 * step);
  }
  return j;
}

/// Max entry error relative to the larger of 1 and the max reference entry.
inline double relativeError(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference) {
  const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
  return (analytic - reference).cwiseAbs().maxCoeff() / scale;
}

/// Classic RK4 on x' = v cos(yaw), y' = v sin(yaw), yaw' = omega.
inline Pose2 rk4Ctrv(const sim::ObjectState& s, double duration, double h) {
  Eigen::Vector3d x(s.pose.x(), s.pose.y(), s.pose.yaw());
  auto f = [&](const Eigen::Vector3d& z) { return Eigen::Vector3d(s.v * std::cos(z(2)), s.v * std::sin(z(2)), s.omega); };
  const long n = std::lround(duration / h);
  const double dt = duration / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector3d k1 = f(x);
    const Eigen::Vector3d k2 = f(x + 0.5 * dt * k1);
    const Eigen::Vector3d k3 = f(x + 0.5 * dt * k2);
    const Eigen::Vector3d k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {x(0), x(1), x(2)};
}

/// Worst closed-form vs RK4 position error over log-spaced |omega| in [1e-5, 2], both signs.
inline double ctrvSweepError(double dt, double h = 1e-4, int samples = 41) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double mag = 1e-5 * std::pow(2.0 / 1e-5, static_cast<double>(i) / (samples - 1));
    for (double sign : {1.0, -1.0}) {
      const sim::ObjectState s{Pose2(3.0, -2.0, 0.7), 12.0, sign * mag};
      const Pose2 closed = sim::stepCtrv(s, dt).pose;
      const Pose2 numeric = rk4Ctrv(s, dt, h);
      worst = std::max(worst, (closed.translation() - numeric.translation()).norm());
    }
  }
  return worst;
}

/// Position jump of the closed form across the straight-line switch.
inline double ctrvSwitchGap(double dt) {
  const double t = sim::kCtrvStraightThreshold;
  double worst = 0.0;
  for (double sign : {1.0, -1.0}) {
    const sim::ObjectState below{Pose2(3.0, -2.0, 0.7), 12.0, sign * t * (1.0 - 1e-9)};
    sim::ObjectState above = below;
    above.omega = sign * t * (1.0 + 1e-9);
    worst = std::max(worst, (sim::stepCtrv(below, dt).pose.translation() - sim::stepCtrv(above, dt).pose.translation()).norm());
  }
  return worst;
}

/// Exhaustive minimum of r' W r - 2 ln w - ln det W; first index wins ties.
inline std::size_t bruteForceMixture(std::span<const graph::MixtureCandidate> candidates) {
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const Eigen::MatrixXd w = c.information;
    const double quad = c.residual.dot(w * c.residual);
    const double logdet = std::log(w.determinant());
    const double score = quad - 2.0 * std::log(c.weight) - logdet;
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

/// Generic dense nonlinear least squares: Eigen's Levenberg-Marquardt with central-difference
/// Jacobians over the stacked whitened residuals. Uses only the residual definitions.
class DenseNlsOracle {
 public:
  DenseNlsOracle(const graph::FactorGraph& graph, const graph::Values& initial) : graph_(graph), initial_(initial) {
    for (const auto& id : graph.variables()) {
      ids_.push_back(id);
      dim_ += id.dim();
    }
    for (const auto& f : graph.factors()) {
      rows_ += f.residualDim();
      whiten_.push_back(Eigen::LLT<Eigen::MatrixXd>(f.information).matrixU());
    }
  }

  graph::Values solve() {
    Eigen::VectorXd x = pack(initial_);
    Functor functor(*this);
    Eigen::NumericalDiff<Functor, Eigen::Central> numeric(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor, Eigen::Central>> lm(numeric);
    lm.setFtol(1e-15);
    lm.setXtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(20000);
    lm.minimize(x);
    return unpack(x);
  }

 private:
  struct Functor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    using QRSolver = Eigen::ColPivHouseholderQR<JacobianType>;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const DenseNlsOracle* owner;
    explicit Functor(const DenseNlsOracle& o) : owner(&o) {}
    int inputs() const { return owner->dim_; }
    int values() const { return owner->rows_; }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
      const graph::Values v = owner->unpack(x);
      out.resize(owner->rows_);
      int row = 0;
      const auto& factors = owner->graph_.factors();
      for (std::size_t i = 0; i < factors.size(); ++i) {
        const Eigen::VectorXd r = graph::factorResidual(factors[i], v);
        out.segment(row, r.size()) = owner->whiten_[i] * r;
        row += static_cast<int>(r.size());
      }
      return 0;
    }
  };

  Eigen::VectorXd pack(const graph::Values& v) const {
    Eigen::VectorXd x(dim_);
    int o = 0;
    for (const auto& id : ids_) {
      const auto& val = v.at(id);
      if (const auto* p = std::get_if<Pose2>(&val)) {
        x.segment<3>(o) = p->vector();
      } else {
        x.segment<2>(o) = std::get<graph::Velocity2>(val).vector();
      }
      o += id.dim();
    }
    return x;
  }

  graph::Values unpack(const Eigen::VectorXd& x) const {
    graph::Values v;
    int o = 0;
    for (const auto& id : ids_) {
      if (id.dim() == 3) {
        v.insert(id, Pose2(x(o), x(o + 1), x(o + 2)));
      } else {
        v.insert(id, graph::Velocity2{x(o), x(o + 1)});
      }
      o += id.dim();
    }
    return v;
  }

  const graph::FactorGraph& graph_;
  graph::Values initial_;
  std::vector<graph::VariableId> ids_;
  std::vector<Eigen::MatrixXd> whiten_;
  int dim_ = 0;
  int rows_ = 0;
};

/// Max state difference between two assignments (yaw wrapped).
inline double stateDistance(const graph::Values& a, const graph::Values& b) {
  double worst = 0.0;
  for (const auto& [id, value] : a) {
    worst = std::max(worst, graph::localDifference(value, b.at(id)).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Rows of a linear Gaussian model A x = b with information W, for closed-form WLS.
struct LinearRow {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd information;
};

inline Eigen::VectorXd weightedLeastSquares(const std::vector<LinearRow>& rows, int dim) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  for (const auto& r : rows) {
    h += r.a.transpose() * r.information * r.a;
    g += r.a.transpose() * r.information * r.b;
  }
  return h.ldlt().solve(g);
}

}  // namespace cslammot::oracle
