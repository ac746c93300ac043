#include "cslammot/graph/types.hpp"

namespace cslammot::graph {

std::string toString(const VariableId& id) {
  const char* kind = id.kind == VariableKind::kVehiclePose  ? "X"
                     : id.kind == VariableKind::kObjectPose ? "O"
                                                            : "V";
  return std::string(kind) + "(" + std::to_string(id.entity) + "," + std::to_string(id.stamp) + ")";
}

Value retract(const Value& value, const Eigen::VectorXd& delta) {
  if (const auto* p = std::get_if<Pose2>(&value)) {
    return boxplus(*p, Tangent3{delta[0], delta[1], delta[2]});
  }
  const auto& v = std::get<Velocity2>(value);
  return Velocity2{v.v + delta[0], v.omega + delta[1]};
}

Eigen::VectorXd localDifference(const Value& a, const Value& b) {
  if (const auto* pa = std::get_if<Pose2>(&a)) {
    return boxminus(*pa, std::get<Pose2>(b)).vector();
  }
  return std::get<Velocity2>(a).vector() - std::get<Velocity2>(b).vector();
}

void Values::insert(const VariableId& id, const Value& value) {
  if (!values_.emplace(id, value).second) throw std::invalid_argument("Values::insert: duplicate " + toString(id));
}

void Values::update(const VariableId& id, const Value& value) {
  auto it = values_.find(id);
  if (it == values_.end()) throw std::out_of_range("Values::update: missing " + toString(id));
  it->second = value;
}

const Value& Values::at(const VariableId& id) const {
  auto it = values_.find(id);
  if (it == values_.end()) throw std::out_of_range("Values::at: missing " + toString(id));
  return it->second;
}

const Pose2& Values::pose(const VariableId& id) const { return std::get<Pose2>(at(id)); }

const Velocity2& Values::velocity(const VariableId& id) const { return std::get<Velocity2>(at(id)); }

}  // namespace cslammot::graph
