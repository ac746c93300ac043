#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cslammot/graph/backend.hpp"
#include "cslammot/graph/marginalize.hpp"
#include "cslammot/graph/max_mixture.hpp"
#include "cslammot/graph/optimizer.hpp"
#include "cslammot/graph/residuals.hpp"
#include "support/graph_cases.hpp"

using namespace cslammot;
using namespace cslammot::graph;

TEST_CASE("analytic Jacobians match central differences for every residual kind") {
  for (const auto kind : oracle::kResidualKinds) {
    CAPTURE(toString(kind));
    CHECK(oracle::jacobianSuiteError(kind, 1000, 42) < 1e-4);
  }
}

TEST_CASE("whitened Jacobians scale with the information square root") {
  Rng rng(9);
  auto inst = oracle::randomFactor(FactorKind::kOdometry, rng);
  const auto plain = linearizeFactor(inst.factor, inst.values);
  inst.factor.information = Eigen::Vector3d(4.0, 9.0, 16.0).asDiagonal();
  const auto weighted = linearizeFactor(inst.factor, inst.values);
  const Eigen::Vector3d scale(2.0, 3.0, 4.0);
  CHECK((weighted.error - scale.cwiseProduct(plain.error)).norm() < 1e-12);
  CHECK((weighted.jacobians[0] - scale.asDiagonal() * plain.jacobians[0]).norm() < 1e-12);
  CHECK(weighted.cost == doctest::Approx(weighted.error.squaredNorm()));
}

TEST_CASE("mixture perception factor differentiates the selected component") {
  Rng rng(21);
  for (int n = 0; n < 100; ++n) {
    const auto x = VariableId::vehicle(0, 0);
    const auto a = VariableId::object(0, 0);
    const auto b = VariableId::object(1, 0);
    Values values;
    values.insert(x, oracle::randomPose(rng));
    values.insert(a, oracle::randomPose(rng));
    values.insert(b, oracle::randomPose(rng));
    std::vector<MixtureComponent> comps;
    comps.push_back({0.6, between(values.pose(x), values.pose(a)), Eigen::Matrix3d::Identity(), 1, false});
    comps.push_back({0.4, oracle::randomPose(rng), Eigen::Matrix3d::Identity(), 2, false});
    const auto f = makeObjectPerceptionMixture(x, {a, b}, comps);
    const auto lin = linearizeFactor(f, values);
    CHECK(lin.selected == 0);
    for (std::size_t j = 0; j < f.variables.size(); ++j) {
      CHECK(oracle::relativeError(lin.jacobians[j], oracle::numericJacobian(f, values, j)) < 1e-4);
    }
  }
}

TEST_CASE("sinc derivative matches finite differences") {
  for (double h : {-2.0, -0.5, -1e-3, 1e-7, 1e-3, 0.3, 1.7}) {
    const auto sinc = [](double t) { return std::abs(t) < 1e-12 ? 1.0 : std::sin(t) / t; };
    const double step = 1e-6;
    const double numeric = (sinc(h + step) - sinc(h - step)) / (2.0 * step);
    CHECK(sincDerivative(h) == doctest::Approx(numeric).epsilon(1e-6));
  }
  CHECK(sincDerivative(0.0) == 0.0);
}

TEST_CASE("optimizer agrees with a generic dense least-squares solver") {
  Rng rng = makeRng(2024, {1});
  for (int n = 0; n < 40; ++n) {
    auto inst = n % 2 == 0 ? oracle::randomPoseGraph(rng) : oracle::randomTrackGraph(rng);
    CAPTURE(inst.family);
    const auto est = optimize(inst.graph, inst.initial);
    CHECK(est.status == OptimizerStatus::kConverged);
    const auto reference = oracle::DenseNlsOracle(inst.graph, inst.initial).solve();
    CHECK(oracle::stateDistance(est.values, reference) < 1e-6);
    CHECK(est.final_cost <= inst.graph.cost(inst.initial));
  }
}

TEST_CASE("optimizer reproduces closed-form weighted least squares on linear problems") {
  Rng rng = makeRng(77, {2});
  for (int n = 0; n < 40; ++n) {
    auto inst = oracle::randomLinearInstance(rng);
    const auto est = optimize(inst.problem.graph, inst.problem.initial);
    CHECK(oracle::stateDistance(est.values, inst.solution) < 1e-10);
  }
}

TEST_CASE("optimizer rejects missing initial values") {
  FactorGraph g;
  g.addVariable(VariableId::vehicle(0, 0));
  g.addFactor(makePosePrior(VariableId::vehicle(0, 0), Pose2(), Eigen::Matrix3d::Identity()));
  CHECK_THROWS_AS(optimize(g, Values{}), std::invalid_argument);
}

TEST_CASE("max-mixture selection equals the exhaustive minimum") {
  Rng rng(31);
  for (int n = 0; n < 1000; ++n) {
    const int count = 1 + static_cast<int>(rng() % 4);
    const int dim = rng() % 2 == 0 ? 3 : 2;
    std::vector<MixtureCandidate> cands;
    for (int i = 0; i < count; ++i) {
      MixtureCandidate c;
      c.weight = oracle::uniform(rng, 0.05, 1.0);
      c.residual = Eigen::VectorXd::Random(dim) * oracle::uniform(rng, 0.0, 3.0);
      c.information = oracle::randomSpd(rng, dim, 0.1, 10.0);
      cands.push_back(c);
    }
    CHECK(maxMixture(cands).index == oracle::bruteForceMixture(cands));
  }
}

TEST_CASE("max-mixture ties go to the lowest index") {
  MixtureCandidate c{0.5, Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Matrix3d::Identity()};
  std::vector<MixtureCandidate> cands{c, c, c};
  CHECK(maxMixture(cands).index == 0);
  cands[0].weight = 0.4;
  CHECK(maxMixture(cands).index == 1);
  CHECK_THROWS(maxMixture(std::vector<MixtureCandidate>{}));
}

TEST_CASE("max-mixture score follows the documented formula") {
  MixtureCandidate c{0.25, Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(2.0, 0.5).asDiagonal()};
  const double expected = (2.0 * 1.0 + 0.5 * 4.0) - 2.0 * std::log(0.25) - std::log(1.0);
  CHECK(mixtureScore(c) == doctest::Approx(expected));
}

TEST_CASE("marginalizing a linear chain preserves the remaining optimum") {
  Rng rng(5);
  FactorGraph g;
  Values init;
  for (int i = 0; i < 5; ++i) {
    g.addVariable(VariableId::velocity(0, i));
    init.insert(VariableId::velocity(0, i), Velocity2{0.0, 0.0});
  }
  g.addFactor(makeVelocityPrior(VariableId::velocity(0, 0), {3.0, 0.2}, oracle::randomSpd(rng, 2)));
  for (int i = 1; i < 5; ++i) {
    g.addFactor(makeVelocity(VariableId::velocity(0, i - 1), VariableId::velocity(0, i), oracle::randomSpd(rng, 2)));
    g.addFactor(makeVelocityPrior(VariableId::velocity(0, i), {3.0 + i, 0.1 * i}, oracle::randomSpd(rng, 2)));
  }
  const auto full = optimize(g, init);
  const auto reduced = marginalizeBefore(g, full.values, 2);
  CHECK(reduced.variables().size() == 3);
  CHECK_FALSE(reduced.hasVariable(VariableId::velocity(0, 1)));
  const auto partial = optimize(reduced, restrictTo(init, reduced));
  for (int i = 2; i < 5; ++i) {
    const auto id = VariableId::velocity(0, i);
    CHECK(localDifference(partial.values.at(id), full.values.at(id)).norm() < 1e-9);
  }
  const auto window = slideWindow(g, full.values, 3);
  CHECK(window.stampRange()->first == 2);
  CHECK_THROWS(slideWindow(g, full.values, 1));
}

TEST_CASE("snapshot lists every variable and factor") {
  Rng rng(1);
  auto inst = oracle::randomPoseGraph(rng);
  std::ostringstream out;
  writeSnapshot(out, inst.graph, inst.initial);
  const std::string text = out.str();
  std::size_t vars = 0, factors = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("var", 0) == 0) ++vars;
    if (line.rfind("factor", 0) == 0) ++factors;
  }
  CHECK(vars == inst.graph.variables().size());
  CHECK(factors == inst.graph.size());
}

TEST_CASE("backend tracks a constant-velocity object from a static ego") {
  BackendParams params;
  SlammotBackend backend(0, params, Pose2());
  sim::ObjectState obj{Pose2(10.0, 0.0, 0.0), 5.0, 0.0};
  BackendStep last;
  for (int k = 0; k < 40; ++k) {
    sim::Detection d;
    d.pose_in_vehicle = obj.pose;
    d.stamp = k;
    d.confidence = 1.0;
    const std::vector<sim::Detection> dets{d};
    last = backend.step(k, Pose2(), dets);
    obj = sim::stepCtrv(obj, params.dt);
  }
  CHECK(approxEqual(last.ego, Pose2(), 1e-6));
  REQUIRE(last.tracks.size() == 1);
  CHECK(last.tracks[0].velocity.v == doctest::Approx(5.0).epsilon(0.05));
  CHECK(backend.activeTrackCount() == 1);
  const auto kfs = backend.keyframeEstimates();
  CHECK(kfs.count(0) == 1);
  CHECK(kfs.count(38) == 1);
  CHECK(kfs.count(39) == 0);
}
