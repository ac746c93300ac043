#include "cslammot/graph/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "cslammot/graph/residuals.hpp"

namespace cslammot::graph {

std::string toString(FactorKind kind) {
  switch (kind) {
    case FactorKind::kPosePrior: return "pose_prior";
    case FactorKind::kVelocityPrior: return "velocity_prior";
    case FactorKind::kOdometry: return "odometry";
    case FactorKind::kInterVehicle: return "inter_vehicle";
    case FactorKind::kObjectPerception: return "object_perception";
    case FactorKind::kMotion: return "motion";
    case FactorKind::kVelocity: return "velocity";
    case FactorKind::kMarginal: return "marginal";
  }
  return "unknown";
}

int Factor::residualDim() const {
  switch (kind) {
    case FactorKind::kVelocityPrior:
    case FactorKind::kVelocity: return 2;
    case FactorKind::kMarginal: return static_cast<int>(marginal->residual.size());
    default: return 3;
  }
}

namespace {

void requireKind(const VariableId& id, VariableKind kind, const char* what) {
  if (id.kind != kind) throw std::invalid_argument(std::string(what) + ": wrong variable kind for " + toString(id));
}

void requireSpd(const Eigen::MatrixXd& info, const char* what) {
  if (info.rows() != info.cols() || !info.isApprox(info.transpose(), 1e-9)) {
    throw std::invalid_argument(std::string(what) + ": information must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + ": information must be SPD");
}

// Upper factor U with U'U = info, so that ||U r||^2 = r' info r.
Eigen::MatrixXd whitener(const Eigen::MatrixXd& info) {
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  return llt.matrixU();
}

double logDet(const Eigen::MatrixXd& info) {
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct Raw {
  Eigen::VectorXd error;
  std::vector<Eigen::MatrixXd> jacobians;
  Eigen::MatrixXd information;
  double offset = 0.0;
  int selected = -1;
};

std::vector<Eigen::MatrixXd> zeroJacobians(const Factor& f, int rows) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(f.variables.size());
  for (const auto& id : f.variables) out.push_back(Eigen::MatrixXd::Zero(rows, id.dim()));
  return out;
}

Raw evaluateMixture(const Factor& f, const Values& values) {
  const Pose2& x_e = values.pose(f.variables[0]);
  double best_score = std::numeric_limits<double>::infinity();
  double min_offset = std::numeric_limits<double>::infinity();
  Raw best;
  for (std::size_t i = 0; i < f.mixture.size(); ++i) {
    const auto& c = f.mixture[i];
    const Pose2& o = values.pose(f.variables[c.target]);
    const auto lin = linearizeObjectPerception(x_e, o, c.measurement);
    const double offset = -2.0 * std::log(c.weight) - logDet(c.information);
    min_offset = std::min(min_offset, offset);
    const double score = lin.error.dot(c.information * lin.error) + offset;
    if (score < best_score) {
      best_score = score;
      best.error = lin.error;
      best.jacobians = zeroJacobians(f, 3);
      best.jacobians[0] = lin.d_first;
      best.jacobians[c.target] = lin.d_second;
      best.information = c.information;
      best.offset = offset;
      best.selected = static_cast<int>(i);
    }
  }
  best.offset -= min_offset;
  return best;
}

Raw evaluate(const Factor& f, const Values& values) {
  Raw raw;
  raw.information = f.information;
  switch (f.kind) {
    case FactorKind::kPosePrior: {
      const auto lin = linearizePosePrior(values.pose(f.variables[0]), f.measurement);
      raw.error = lin.error;
      raw.jacobians = {lin.d_first};
      break;
    }
    case FactorKind::kVelocityPrior: {
      raw.error = residualVelocity(f.velocity_measurement, values.velocity(f.variables[0]));
      raw.jacobians = {Eigen::Matrix2d::Identity()};
      break;
    }
    case FactorKind::kOdometry: {
      const auto lin =
          linearizeOdometry(values.pose(f.variables[0]), values.pose(f.variables[1]), f.measurement);
      raw.error = lin.error;
      raw.jacobians = {lin.d_first, lin.d_second};
      break;
    }
    case FactorKind::kInterVehicle: {
      const auto lin = linearizeInterVehicle(values.pose(f.variables[0]), f.measurement);
      raw.error = lin.error;
      raw.jacobians = {lin.d_first};
      break;
    }
    case FactorKind::kObjectPerception: {
      if (!f.mixture.empty()) return evaluateMixture(f, values);
      const auto lin =
          linearizeObjectPerception(values.pose(f.variables[0]), values.pose(f.variables[1]), f.measurement);
      raw.error = lin.error;
      raw.jacobians = {lin.d_first, lin.d_second};
      break;
    }
    case FactorKind::kMotion: {
      const auto lin = linearizeMotion(values.pose(f.variables[0]), values.velocity(f.variables[1]),
                                       values.pose(f.variables[2]), f.dt);
      raw.error = lin.error;
      raw.jacobians = {lin.d_prev_pose, lin.d_prev_velocity, lin.d_cur_pose};
      break;
    }
    case FactorKind::kVelocity: {
      raw.error = residualVelocity(values.velocity(f.variables[0]), values.velocity(f.variables[1]));
      raw.jacobians = {-Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
      break;
    }
    case FactorKind::kMarginal: {
      const auto& m = *f.marginal;
      Eigen::VectorXd delta(m.jacobian.cols());
      int offset = 0;
      raw.jacobians.clear();
      for (std::size_t i = 0; i < f.variables.size(); ++i) {
        const int d = f.variables[i].dim();
        delta.segment(offset, d) = localDifference(values.at(f.variables[i]), m.linearization_point[i]);
        raw.jacobians.push_back(m.jacobian.middleCols(offset, d));
        offset += d;
      }
      raw.error = m.jacobian * delta + m.residual;
      raw.information = Eigen::MatrixXd::Identity(raw.error.size(), raw.error.size());
      break;
    }
  }
  return raw;
}

}  // namespace

Factor makePosePrior(const VariableId& x, const Pose2& prior, const Eigen::Matrix3d& information) {
  if (x.kind == VariableKind::kObjectVelocity) throw std::invalid_argument("makePosePrior: velocity variable");
  requireSpd(information, "makePosePrior");
  Factor f;
  f.kind = FactorKind::kPosePrior;
  f.variables = {x};
  f.measurement = prior;
  f.information = information;
  return f;
}

Factor makeVelocityPrior(const VariableId& v, const Velocity2& prior, const Eigen::Matrix2d& information) {
  requireKind(v, VariableKind::kObjectVelocity, "makeVelocityPrior");
  requireSpd(information, "makeVelocityPrior");
  Factor f;
  f.kind = FactorKind::kVelocityPrior;
  f.variables = {v};
  f.velocity_measurement = prior;
  f.information = information;
  return f;
}

Factor makeOdometry(const VariableId& prev, const VariableId& cur, const Pose2& meas,
                    const Eigen::Matrix3d& information) {
  requireKind(prev, VariableKind::kVehiclePose, "makeOdometry");
  requireKind(cur, VariableKind::kVehiclePose, "makeOdometry");
  requireSpd(information, "makeOdometry");
  Factor f;
  f.kind = FactorKind::kOdometry;
  f.variables = {prev, cur};
  f.measurement = meas;
  f.information = information;
  return f;
}

Factor makeInterVehicle(const VariableId& ego, const Pose2& x_en, const Eigen::Matrix3d& information) {
  requireKind(ego, VariableKind::kVehiclePose, "makeInterVehicle");
  requireSpd(information, "makeInterVehicle");
  Factor f;
  f.kind = FactorKind::kInterVehicle;
  f.variables = {ego};
  f.measurement = x_en;
  f.information = information;
  return f;
}

Factor makeObjectPerception(const VariableId& ego, const VariableId& object, const Pose2& z_in_vehicle,
                            const Eigen::Matrix3d& information) {
  requireKind(ego, VariableKind::kVehiclePose, "makeObjectPerception");
  requireKind(object, VariableKind::kObjectPose, "makeObjectPerception");
  requireSpd(information, "makeObjectPerception");
  Factor f;
  f.kind = FactorKind::kObjectPerception;
  f.variables = {ego, object};
  f.measurement = z_in_vehicle;
  f.information = information;
  return f;
}

Factor makeObjectPerceptionMixture(const VariableId& ego, const std::vector<VariableId>& objects,
                                   std::vector<MixtureComponent> components) {
  requireKind(ego, VariableKind::kVehiclePose, "makeObjectPerceptionMixture");
  if (objects.empty() || components.empty()) {
    throw std::invalid_argument("makeObjectPerceptionMixture: needs objects and components");
  }
  Factor f;
  f.kind = FactorKind::kObjectPerception;
  f.variables.push_back(ego);
  for (const auto& o : objects) {
    requireKind(o, VariableKind::kObjectPose, "makeObjectPerceptionMixture");
    f.variables.push_back(o);
  }
  for (const auto& c : components) {
    if (c.weight <= 0.0) throw std::invalid_argument("makeObjectPerceptionMixture: weights must be positive");
    if (c.target == 0 || c.target >= f.variables.size()) {
      throw std::invalid_argument("makeObjectPerceptionMixture: component target out of range");
    }
    requireSpd(c.information, "makeObjectPerceptionMixture");
  }
  f.measurement = components.front().measurement;
  f.information = components.front().information;
  f.mixture = std::move(components);
  return f;
}

Factor makeMotion(const VariableId& o_prev, const VariableId& v_prev, const VariableId& o_cur, double dt,
                  const Eigen::Matrix3d& information) {
  requireKind(o_prev, VariableKind::kObjectPose, "makeMotion");
  requireKind(v_prev, VariableKind::kObjectVelocity, "makeMotion");
  requireKind(o_cur, VariableKind::kObjectPose, "makeMotion");
  if (!(dt > 0.0)) throw std::invalid_argument("makeMotion: dt must be positive");
  requireSpd(information, "makeMotion");
  Factor f;
  f.kind = FactorKind::kMotion;
  f.variables = {o_prev, v_prev, o_cur};
  f.dt = dt;
  f.information = information;
  return f;
}

Factor makeVelocity(const VariableId& v_prev, const VariableId& v_cur, const Eigen::Matrix2d& information) {
  requireKind(v_prev, VariableKind::kObjectVelocity, "makeVelocity");
  requireKind(v_cur, VariableKind::kObjectVelocity, "makeVelocity");
  requireSpd(information, "makeVelocity");
  Factor f;
  f.kind = FactorKind::kVelocity;
  f.variables = {v_prev, v_cur};
  f.information = information;
  return f;
}

FactorLinearization linearizeFactor(const Factor& factor, const Values& values) {
  Raw raw = evaluate(factor, values);
  FactorLinearization out;
  out.selected = raw.selected;
  if (factor.kind == FactorKind::kMarginal) {
    out.error = std::move(raw.error);
    out.jacobians = std::move(raw.jacobians);
  } else {
    const Eigen::MatrixXd u = whitener(raw.information);
    out.error = u * raw.error;
    out.jacobians.reserve(raw.jacobians.size());
    for (const auto& j : raw.jacobians) out.jacobians.push_back(u * j);
  }
  out.cost = out.error.squaredNorm() + raw.offset;
  return out;
}

Eigen::VectorXd factorResidual(const Factor& factor, const Values& values) { return evaluate(factor, values).error; }

double factorCost(const Factor& factor, const Values& values) {
  const Raw raw = evaluate(factor, values);
  return raw.error.dot(raw.information * raw.error) + raw.offset;
}

void FactorGraph::addVariable(const VariableId& id) { variables_.insert(id); }

void FactorGraph::removeVariable(const VariableId& id) {
  for (const auto& f : factors_) {
    if (std::find(f.variables.begin(), f.variables.end(), id) != f.variables.end()) {
      throw std::logic_error("FactorGraph::removeVariable: still referenced " + toString(id));
    }
  }
  variables_.erase(id);
}

std::size_t FactorGraph::addFactor(Factor factor) {
  for (const auto& id : factor.variables) {
    if (!hasVariable(id)) throw std::invalid_argument("FactorGraph::addFactor: unknown variable " + toString(id));
  }
  factors_.push_back(std::move(factor));
  return factors_.size() - 1;
}

double FactorGraph::cost(const Values& values) const {
  double total = 0.0;
  for (const auto& f : factors_) total += factorCost(f, values);
  return total;
}

std::optional<std::pair<int, int>> FactorGraph::stampRange() const {
  if (variables_.empty()) return std::nullopt;
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& id : variables_) {
    lo = std::min(lo, id.stamp);
    hi = std::max(hi, id.stamp);
  }
  return std::make_pair(lo, hi);
}

Values restrictTo(const Values& values, const FactorGraph& graph) {
  Values out;
  for (const auto& id : graph.variables()) out.insert(id, values.at(id));
  return out;
}

}  // namespace cslammot::graph
