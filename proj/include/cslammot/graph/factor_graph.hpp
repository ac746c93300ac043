#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cslammot/graph/types.hpp"

namespace cslammot::graph {

enum class FactorKind : int {
  kPosePrior = 0,
  kVelocityPrior,
  kOdometry,
  kInterVehicle,
  kObjectPerception,
  kMotion,
  kVelocity,
  kMarginal,
};

std::string toString(FactorKind kind);

/// Association hypothesis of a perception factor. `target` indexes Factor::variables (never 0, the ego pose).
struct MixtureComponent {
  double weight = 1.0;
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  std::size_t target = 1;
  /// Broad clutter hypothesis; selecting it does not count as an association.
  bool outlier = false;
};

/// Dense Gaussian left behind by marginalization: cost ||J * (x - x0) + r0||^2.
struct MarginalTerm {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd residual;
  std::vector<Value> linearization_point;
};

struct Factor {
  FactorKind kind = FactorKind::kPosePrior;
  std::vector<VariableId> variables;
  /// Prior pose, odometry increment, inter-vehicle pose or detection in the ego frame.
  Pose2 measurement;
  Velocity2 velocity_measurement;
  double dt = 0.0;
  Eigen::MatrixXd information;
  /// Non-empty only for max-mixture perception factors; overrides measurement/information.
  std::vector<MixtureComponent> mixture;
  std::optional<MarginalTerm> marginal;

  int residualDim() const;
};

Factor makePosePrior(const VariableId& x, const Pose2& prior, const Eigen::Matrix3d& information);
Factor makeVelocityPrior(const VariableId& v, const Velocity2& prior, const Eigen::Matrix2d& information);
Factor makeOdometry(const VariableId& prev, const VariableId& cur, const Pose2& meas,
                    const Eigen::Matrix3d& information);
Factor makeInterVehicle(const VariableId& ego, const Pose2& x_en, const Eigen::Matrix3d& information);
Factor makeObjectPerception(const VariableId& ego, const VariableId& object, const Pose2& z_in_vehicle,
                            const Eigen::Matrix3d& information);
/// Perception factor whose association is chosen among `objects` each evaluation.
Factor makeObjectPerceptionMixture(const VariableId& ego, const std::vector<VariableId>& objects,
                                   std::vector<MixtureComponent> components);
Factor makeMotion(const VariableId& o_prev, const VariableId& v_prev, const VariableId& o_cur, double dt,
                  const Eigen::Matrix3d& information);
Factor makeVelocity(const VariableId& v_prev, const VariableId& v_cur, const Eigen::Matrix2d& information);

/// Whitened residual and per-variable whitened Jacobians at the given values.
struct FactorLinearization {
  Eigen::VectorXd error;
  std::vector<Eigen::MatrixXd> jacobians;
  /// Squared whitened error, plus the mixture offset for mixture factors.
  double cost = 0.0;
  /// Chosen mixture component, -1 for ordinary factors.
  int selected = -1;
};

FactorLinearization linearizeFactor(const Factor& factor, const Values& values);
/// Unwhitened residual of the (selected) measurement.
Eigen::VectorXd factorResidual(const Factor& factor, const Values& values);
double factorCost(const Factor& factor, const Values& values);

/// Variable registry plus factor list. Factors may only reference registered variables.
class FactorGraph {
 public:
  void addVariable(const VariableId& id);
  bool hasVariable(const VariableId& id) const { return variables_.count(id) != 0; }
  const std::set<VariableId>& variables() const { return variables_; }
  void removeVariable(const VariableId& id);

  std::size_t addFactor(Factor factor);
  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Factor>& mutableFactors() { return factors_; }

  std::size_t size() const { return factors_.size(); }
  double cost(const Values& values) const;

  /// Oldest and newest stamps over all variables; nullopt when empty.
  std::optional<std::pair<int, int>> stampRange() const;

 private:
  std::set<VariableId> variables_;
  std::vector<Factor> factors_;
};

/// Copy of `values` restricted to the graph's variables.
Values restrictTo(const Values& values, const FactorGraph& graph);

}  // namespace cslammot::graph
