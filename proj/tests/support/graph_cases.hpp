#pragma once

// Random factor and graph instances shared by the factor-graph tests and the acceptance suite.

#include <array>
#include <string>
#include <vector>

#include "cslammot/graph/factor_graph.hpp"
#include "cslammot/graph/optimizer.hpp"
#include "support/oracles.hpp"

namespace cslammot::oracle {

using graph::Factor;
using graph::FactorKind;
using graph::Values;
using graph::VariableId;
using graph::Velocity2;

inline const std::array<FactorKind, 6> kResidualKinds = {
    FactorKind::kPosePrior, FactorKind::kOdometry, FactorKind::kInterVehicle,
    FactorKind::kObjectPerception, FactorKind::kMotion, FactorKind::kVelocity};

inline Velocity2 randomVelocity(Rng& rng) {
  const double omega = uniform(rng, 0.0, 1.0) < 0.2 ? uniform(rng, -1e-5, 1e-5) : uniform(rng, -2.0, 2.0);
  return {uniform(rng, -15.0, 15.0), omega};
}

struct FactorInstance {
  Factor factor;
  Values values;
};

/// One factor of `kind` with identity information at a random linearization point.
inline FactorInstance randomFactor(FactorKind kind, Rng& rng) {
  FactorInstance out;
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  const Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
  const auto x0 = VariableId::vehicle(0, 0);
  const auto x1 = VariableId::vehicle(0, 1);
  const auto o0 = VariableId::object(0, 0);
  const auto o1 = VariableId::object(0, 1);
  const auto v0 = VariableId::velocity(0, 0);
  const auto v1 = VariableId::velocity(0, 1);
  switch (kind) {
    case FactorKind::kPosePrior:
      out.values.insert(x0, randomPose(rng));
      out.factor = graph::makePosePrior(x0, randomPose(rng), i3);
      break;
    case FactorKind::kOdometry:
      out.values.insert(x0, randomPose(rng));
      out.values.insert(x1, randomPose(rng));
      out.factor = graph::makeOdometry(x0, x1, randomPose(rng, 3.0), i3);
      break;
    case FactorKind::kInterVehicle:
      out.values.insert(x0, randomPose(rng));
      out.factor = graph::makeInterVehicle(x0, randomPose(rng), i3);
      break;
    case FactorKind::kObjectPerception:
      out.values.insert(x0, randomPose(rng));
      out.values.insert(o0, randomPose(rng));
      out.factor = graph::makeObjectPerception(x0, o0, randomPose(rng, 30.0), i3);
      break;
    case FactorKind::kMotion:
      out.values.insert(o0, randomPose(rng));
      out.values.insert(v0, randomVelocity(rng));
      out.values.insert(o1, randomPose(rng));
      out.factor = graph::makeMotion(o0, v0, o1, uniform(rng, 0.05, 1.0), i3);
      break;
    case FactorKind::kVelocity:
      out.values.insert(v0, randomVelocity(rng));
      out.values.insert(v1, randomVelocity(rng));
      out.factor = graph::makeVelocity(v0, v1, i2);
      break;
    default:
      break;
  }
  return out;
}

/// Worst relative Jacobian error over `count` random points of one kind.
inline double jacobianSuiteError(FactorKind kind, int count, std::uint64_t seed) {
  Rng rng = makeRng(seed, {static_cast<std::uint64_t>(kind)});
  double worst = 0.0;
  for (int n = 0; n < count; ++n) {
    const auto inst = randomFactor(kind, rng);
    const auto lin = graph::linearizeFactor(inst.factor, inst.values);
    for (std::size_t j = 0; j < inst.factor.variables.size(); ++j) {
      worst = std::max(worst, relativeError(lin.jacobians[j], numericJacobian(inst.factor, inst.values, j)));
    }
  }
  return worst;
}

struct GraphInstance {
  std::string family;
  graph::FactorGraph graph;
  Values initial;
};

inline Pose2 jitter(const Pose2& p, Rng& rng, double pos, double yaw) {
  return {p.x() + uniform(rng, -pos, pos), p.y() + uniform(rng, -pos, pos), p.yaw() + uniform(rng, -yaw, yaw)};
}

inline Eigen::Matrix3d poseInformation(Rng& rng) {
  Eigen::Vector3d sigma(uniform(rng, 0.05, 0.5), uniform(rng, 0.05, 0.5), uniform(rng, 0.01, 0.1));
  return sigma.cwiseInverse().cwiseAbs2().asDiagonal();
}

/// Vehicle pose chain: anchored first pose, noisy odometry and absolute inter-vehicle fixes.
inline GraphInstance randomPoseGraph(Rng& rng) {
  GraphInstance g{"pose_graph", {}, {}};
  const int n = 3 + static_cast<int>(rng() % 4);
  std::vector<Pose2> truth{randomPose(rng, 20.0)};
  for (int i = 1; i < n; ++i) truth.push_back(compose(truth.back(), Pose2(uniform(rng, 0.5, 3.0), uniform(rng, -0.5, 0.5), uniform(rng, -0.4, 0.4))));
  for (int i = 0; i < n; ++i) {
    const auto id = VariableId::vehicle(0, i);
    g.graph.addVariable(id);
    g.initial.insert(id, jitter(truth[i], rng, 0.5, 0.1));
  }
  g.graph.addFactor(graph::makePosePrior(VariableId::vehicle(0, 0), jitter(truth[0], rng, 0.05, 0.01), poseInformation(rng)));
  for (int i = 1; i < n; ++i) {
    const Pose2 meas = jitter(between(truth[i - 1], truth[i]), rng, 0.1, 0.02);
    g.graph.addFactor(graph::makeOdometry(VariableId::vehicle(0, i - 1), VariableId::vehicle(0, i), meas, poseInformation(rng)));
    if (rng() % 2 == 0) {
      g.graph.addFactor(graph::makeInterVehicle(VariableId::vehicle(0, i), jitter(truth[i], rng, 0.3, 0.05), poseInformation(rng)));
    }
  }
  return g;
}

/// Two ego poses observing one moving object: perception, motion and velocity factors.
inline GraphInstance randomTrackGraph(Rng& rng) {
  GraphInstance g{"object_track", {}, {}};
  const double dt = uniform(rng, 0.1, 0.5);
  const Pose2 ego0 = randomPose(rng, 20.0);
  const Pose2 ego1 = compose(ego0, Pose2(uniform(rng, 0.5, 2.0), 0.0, uniform(rng, -0.2, 0.2)));
  const Velocity2 vel{uniform(rng, 2.0, 12.0), uniform(rng, -0.5, 0.5)};
  const Pose2 obj0 = compose(ego0, Pose2(uniform(rng, 5.0, 25.0), uniform(rng, -8.0, 8.0), uniform(rng, -1.0, 1.0)));
  const sim::ObjectState start{obj0, vel.v, vel.omega};
  const Pose2 obj1 = sim::stepCtrv(start, dt).pose;

  const auto x0 = VariableId::vehicle(0, 0);
  const auto x1 = VariableId::vehicle(0, 1);
  const auto o0 = VariableId::object(0, 0);
  const auto o1 = VariableId::object(0, 1);
  const auto v0 = VariableId::velocity(0, 0);
  const auto v1 = VariableId::velocity(0, 1);
  for (const auto& id : {x0, x1, o0, o1, v0, v1}) g.graph.addVariable(id);
  g.initial.insert(x0, jitter(ego0, rng, 0.3, 0.05));
  g.initial.insert(x1, jitter(ego1, rng, 0.3, 0.05));
  g.initial.insert(o0, jitter(obj0, rng, 0.5, 0.1));
  g.initial.insert(o1, jitter(obj1, rng, 0.5, 0.1));
  g.initial.insert(v0, Velocity2{vel.v + uniform(rng, -1.0, 1.0), vel.omega + uniform(rng, -0.1, 0.1)});
  g.initial.insert(v1, Velocity2{vel.v + uniform(rng, -1.0, 1.0), vel.omega + uniform(rng, -0.1, 0.1)});

  const Eigen::Matrix2d vel_info = Eigen::Vector2d(1.0 / 0.25, 1.0 / 0.01).asDiagonal();
  g.graph.addFactor(graph::makePosePrior(x0, jitter(ego0, rng, 0.05, 0.01), poseInformation(rng)));
  g.graph.addFactor(graph::makeOdometry(x0, x1, jitter(between(ego0, ego1), rng, 0.1, 0.02), poseInformation(rng)));
  g.graph.addFactor(graph::makeObjectPerception(x0, o0, jitter(between(ego0, obj0), rng, 0.2, 0.05), poseInformation(rng)));
  g.graph.addFactor(graph::makeObjectPerception(x1, o1, jitter(between(ego1, obj1), rng, 0.2, 0.05), poseInformation(rng)));
  g.graph.addFactor(graph::makeMotion(o0, v0, o1, dt, poseInformation(rng)));
  g.graph.addFactor(graph::makeVelocityPrior(v0, Velocity2{vel.v + uniform(rng, -0.5, 0.5), vel.omega}, vel_info));
  g.graph.addFactor(graph::makeVelocity(v0, v1, vel_info));
  return g;
}

/// Linear-Gaussian instance: velocity chain plus poses constrained only by priors, with its
/// closed-form weighted least-squares solution.
struct LinearInstance {
  GraphInstance problem;
  Values solution;
};

inline LinearInstance randomLinearInstance(Rng& rng) {
  LinearInstance out{{"linear", {}, {}}, {}};
  auto& g = out.problem;
  std::vector<LinearRow> rows;
  int offset = 0;
  std::vector<std::pair<VariableId, int>> layout;

  const int chain = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < chain; ++i) {
    const auto id = VariableId::velocity(0, i);
    g.graph.addVariable(id);
    g.initial.insert(id, randomVelocity(rng));
    layout.emplace_back(id, offset);
    offset += 2;
  }
  const Velocity2 prior{uniform(rng, -10.0, 10.0), uniform(rng, -1.0, 1.0)};
  const Eigen::Matrix2d prior_info = randomSpd(rng, 2);
  g.graph.addFactor(graph::makeVelocityPrior(VariableId::velocity(0, 0), prior, prior_info));

  struct Term {
    std::vector<std::pair<int, Eigen::MatrixXd>> blocks;
    Eigen::VectorXd b;
    Eigen::MatrixXd information;
  };
  std::vector<Term> terms;
  terms.push_back({{{0, Eigen::Matrix2d::Identity()}}, prior.vector(), prior_info});
  for (int i = 1; i < chain; ++i) {
    const Eigen::Matrix2d info = randomSpd(rng, 2);
    g.graph.addFactor(graph::makeVelocity(VariableId::velocity(0, i - 1), VariableId::velocity(0, i), info));
    terms.push_back({{{2 * (i - 1), -Eigen::Matrix2d::Identity()}, {2 * i, Eigen::Matrix2d::Identity()}},
                     Eigen::Vector2d::Zero(), info});
  }

  const int poses = 6 - chain >= 1 ? 1 + static_cast<int>(rng() % static_cast<unsigned>(6 - chain)) : 0;
  for (int p = 0; p < poses; ++p) {
    const auto id = VariableId::vehicle(0, p);
    const Pose2 base = {uniform(rng, -20.0, 20.0), uniform(rng, -20.0, 20.0), uniform(rng, -2.0, 2.0)};
    g.graph.addVariable(id);
    g.initial.insert(id, jitter(base, rng, 1.0, 0.1));
    layout.emplace_back(id, offset);
    const int priors = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < priors; ++k) {
      const Pose2 pk = jitter(base, rng, 0.5, 0.1);
      const Eigen::Matrix3d info = randomSpd(rng, 3);
      g.graph.addFactor(graph::makePosePrior(id, pk, info));
      // between(pk, x) = [R(pk)' (t - t_pk), yaw - yaw_pk]: linear in x for fixed pk.
      Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
      a.topLeftCorner<2, 2>() = pk.transform().rotationMatrix().transpose();
      terms.push_back({{{offset, a}}, a * pk.vector(), info});
    }
    offset += 3;
  }

  for (const auto& t : terms) {
    LinearRow r{Eigen::MatrixXd::Zero(t.b.size(), offset), t.b, t.information};
    for (const auto& [col, block] : t.blocks) r.a.block(0, col, block.rows(), block.cols()) = block;
    rows.push_back(r);
  }
  const Eigen::VectorXd x = weightedLeastSquares(rows, offset);
  for (const auto& [id, col] : layout) {
    if (id.dim() == 2) {
      out.solution.insert(id, Velocity2{x(col), x(col + 1)});
    } else {
      out.solution.insert(id, Pose2(x(col), x(col + 1), x(col + 2)));
    }
  }
  return out;
}

}  // namespace cslammot::oracle
