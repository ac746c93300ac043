#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "cslammot/geometry.hpp"

namespace cslammot::graph {

enum class VariableKind : int { kVehiclePose = 0, kObjectPose = 1, kObjectVelocity = 2 };

struct VariableId {
  VariableKind kind = VariableKind::kVehiclePose;
  int entity = 0;
  int stamp = 0;

  auto operator<=>(const VariableId&) const = default;
  bool operator==(const VariableId&) const = default;

  int dim() const { return kind == VariableKind::kObjectVelocity ? 2 : 3; }
  static VariableId vehicle(int id, int stamp) { return {VariableKind::kVehiclePose, id, stamp}; }
  static VariableId object(int id, int stamp) { return {VariableKind::kObjectPose, id, stamp}; }
  static VariableId velocity(int id, int stamp) { return {VariableKind::kObjectVelocity, id, stamp}; }
};

std::string toString(const VariableId& id);

/// Object speed along its heading and turn rate.
struct Velocity2 {
  double v = 0.0;
  double omega = 0.0;

  Eigen::Vector2d vector() const { return {v, omega}; }
};

using Value = std::variant<Pose2, Velocity2>;

/// Additive update in the value's local parameterization.
Value retract(const Value& value, const Eigen::VectorXd& delta);
/// Local difference a - b (yaw wrapped for poses).
Eigen::VectorXd localDifference(const Value& a, const Value& b);

/// Variable assignment, ordered by VariableId.
class Values {
 public:
  void insert(const VariableId& id, const Value& value);
  void update(const VariableId& id, const Value& value);
  void erase(const VariableId& id) { values_.erase(id); }
  bool contains(const VariableId& id) const { return values_.count(id) != 0; }
  const Value& at(const VariableId& id) const;
  const Pose2& pose(const VariableId& id) const;
  const Velocity2& velocity(const VariableId& id) const;
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::map<VariableId, Value> values_;
};

}  // namespace cslammot::graph
