#include "cslammot/graph/backend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "cslammot/graph/marginalize.hpp"
#include "cslammot/graph/residuals.hpp"

namespace cslammot::graph {

namespace {

constexpr double kMinConfidence = 0.05;

Eigen::Matrix3d perceptionInformation(const Eigen::Matrix3d& covariance, double confidence) {
  return std::max(confidence, kMinConfidence) * covariance.inverse();
}

}  // namespace

SlammotBackend::SlammotBackend(int vehicle, const BackendParams& params, const Pose2& anchor)
    : vehicle_(vehicle), params_(params) {
  if (params_.keyframe_stride < 1) throw std::invalid_argument("SlammotBackend: keyframe_stride must be >= 1");
  if (params_.horizon < 2 * params_.keyframe_stride) {
    throw std::invalid_argument("SlammotBackend: horizon must cover at least 2 keyframes");
  }
  if (!(params_.dt > 0.0)) throw std::invalid_argument("SlammotBackend: dt must be positive");
  since_keyframe_ = anchor;  // consumed by the first step
}

void SlammotBackend::addVariable(const VariableId& id, const Value& value) {
  graph_.addVariable(id);
  values_.insert(id, value);
}

Pose2 SlammotBackend::currentEgo() const {
  return compose(values_.pose(VariableId::vehicle(vehicle_, last_keyframe_)), since_keyframe_);
}

int SlammotBackend::activeTrackCount() const {
  return static_cast<int>(std::count_if(tracks_.begin(), tracks_.end(), [](const auto& t) { return t.second.active; }));
}

void SlammotBackend::extendTracks(int k) {
  for (auto& [id, track] : tracks_) {
    if (!track.active || track.last_stamp != k - 1) continue;
    const VariableId o_prev = VariableId::object(id, k - 1);
    const VariableId v_prev = VariableId::velocity(id, k - 1);
    const VariableId o_cur = VariableId::object(id, k);
    const VariableId v_cur = VariableId::velocity(id, k);
    const Velocity2 vel = values_.velocity(v_prev);
    const Pose2 predicted = sim::stepCtrv({values_.pose(o_prev), vel.v, vel.omega}, params_.dt).pose;
    addVariable(o_cur, predicted);
    addVariable(v_cur, vel);
    graph_.addFactor(makeMotion(o_prev, v_prev, o_cur, params_.dt, params_.noise.motion.inverse()));
    graph_.addFactor(makeVelocity(v_prev, v_cur, params_.noise.velocity.inverse()));
    track.last_stamp = k;
  }
}

void SlammotBackend::associate(int k, std::span<const sim::Detection> detections,
                               std::vector<std::pair<std::size_t, sim::Detection>>& mixture_factors) {
  const VariableId ego = VariableId::vehicle(vehicle_, last_keyframe_);
  const Pose2 ego_pose = values_.pose(ego);
  const auto& tp = params_.tracking;
  const Eigen::Matrix2d base_gate_cov = params_.noise.motion.topLeftCorner<2, 2>();

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].confidence > detections[b].confidence; });

  std::vector<std::size_t> unmatched;
  for (std::size_t idx : order) {
    const sim::Detection z = virtualizeDetection(detections[idx], since_keyframe_);
    const Pose2 world = compose(ego_pose, z.pose_in_vehicle);
    const double conf = std::max(z.confidence, kMinConfidence);
    const Eigen::Matrix2d s = params_.noise.perception.topLeftCorner<2, 2>() / conf + base_gate_cov;
    const Eigen::Matrix2d s_inv = s.inverse();

    std::vector<std::pair<double, int>> gated;
    for (const auto& [id, track] : tracks_) {
      if (!track.active || track.last_stamp != k) continue;
      const Eigen::Vector2d d = world.translation() - values_.pose(VariableId::object(id, k)).translation();
      const double m2 = d.dot(s_inv * d);
      if (m2 <= tp.gate) gated.emplace_back(m2, id);
    }
    if (gated.empty()) {
      unmatched.push_back(idx);
      continue;
    }
    std::stable_sort(gated.begin(), gated.end());
    const Eigen::Matrix3d info = perceptionInformation(params_.noise.perception, z.confidence);
    std::vector<VariableId> objects;
    std::vector<MixtureComponent> components;
    for (const auto& [m2, id] : gated) {
      objects.push_back(VariableId::object(id, k));
      MixtureComponent c;
      c.weight = 1.0;
      c.measurement = z.pose_in_vehicle;
      c.information = info;
      c.target = objects.size();
      components.push_back(c);
    }
    MixtureComponent outlier;
    outlier.weight = tp.outlier_weight;
    outlier.measurement = z.pose_in_vehicle;
    outlier.information = tp.outlier_information_scale * info;
    outlier.target = 1;
    outlier.outlier = true;
    components.push_back(outlier);
    mixture_factors.emplace_back(graph_.addFactor(makeObjectPerceptionMixture(ego, objects, std::move(components))),
                                 z);
  }

  // Unmatched detections seed or confirm tentative tracks.
  std::vector<Tentative> next;
  std::vector<bool> used(tentatives_.size(), false);
  for (std::size_t idx : unmatched) {
    const sim::Detection z = virtualizeDetection(detections[idx], since_keyframe_);
    const Pose2 world = compose(ego_pose, z.pose_in_vehicle);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < tentatives_.size(); ++t) {
      if (used[t] || tentatives_[t].stamp != k - 1) continue;
      const double d = (tentatives_[t].world.translation() - world.translation()).norm();
      if (d <= tp.birth_distance && d < best_d) {
        best_d = d;
        best = static_cast<int>(t);
      }
    }
    const int count = best >= 0 ? tentatives_[static_cast<std::size_t>(best)].count + 1 : 1;
    if (best >= 0) used[static_cast<std::size_t>(best)] = true;
    if (count < tp.birth_frames) {
      next.push_back({world, k, count, z});
      continue;
    }
    const int id = next_track_++;
    Velocity2 vel;
    if (best >= 0) {
      const Eigen::Vector2d disp = world.translation() - tentatives_[static_cast<std::size_t>(best)].world.translation();
      vel.v = disp.dot(Eigen::Vector2d(std::cos(world.yaw()), std::sin(world.yaw()))) / params_.dt;
    }
    const VariableId o = VariableId::object(id, k);
    const VariableId v = VariableId::velocity(id, k);
    addVariable(o, world);
    addVariable(v, vel);
    graph_.addFactor(makeObjectPerception(ego, o, z.pose_in_vehicle,
                                          perceptionInformation(params_.noise.perception, z.confidence)));
    graph_.addFactor(makeVelocityPrior(v, vel, params_.noise.velocity_birth.inverse()));
    Track track;
    track.id = id;
    track.last_stamp = k;
    track.length = z.length;
    track.width = z.width;
    track.confidence = z.confidence;
    tracks_[id] = track;
  }
  tentatives_ = std::move(next);
}

void SlammotBackend::updateLifecycle(int k,
                                     const std::vector<std::pair<std::size_t, sim::Detection>>& mixture_factors) {
  std::map<int, std::vector<const sim::Detection*>> hits;
  for (const auto& [fi, z] : mixture_factors) {
    const Factor& f = graph_.factors()[fi];
    const FactorLinearization lin = linearizeFactor(f, values_);
    const auto& c = f.mixture[static_cast<std::size_t>(lin.selected)];
    if (c.outlier) continue;
    hits[f.variables[c.target].entity].push_back(&z);
  }
  for (auto& [id, track] : tracks_) {
    if (!track.active) continue;
    auto hit = hits.find(id);
    if (track.last_stamp == k && hit != hits.end()) {
      const sim::Detection* best = hit->second.front();
      for (const auto* z : hit->second) {
        if (z->confidence > best->confidence) best = z;
      }
      track.misses = 0;
      track.length = 0.8 * track.length + 0.2 * best->length;
      track.width = 0.8 * track.width + 0.2 * best->width;
      track.confidence = best->confidence;
      continue;
    }
    const bool born_now = track.last_stamp == k && !values_.contains(VariableId::object(id, k - 1));
    if (born_now) continue;
    if (++track.misses >= params_.tracking.death_frames) track.active = false;
  }
}

void SlammotBackend::slide(int k) {
  const int stride = params_.keyframe_stride;
  const int keep_from = k - params_.horizon + 1;
  if (keep_from <= 0) return;
  const int cutoff = (keep_from / stride) * stride;
  const auto range = graph_.stampRange();
  if (!range || cutoff <= range->first) return;
  for (const auto& id : graph_.variables()) {
    if (id.kind == VariableKind::kVehiclePose && id.stamp < cutoff) finalized_[id.stamp] = values_.pose(id);
  }
  graph_ = marginalizeBefore(graph_, values_, cutoff);
  values_ = restrictTo(values_, graph_);
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (!it->second.active && it->second.last_stamp < cutoff) {
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
}

BackendStep SlammotBackend::step(int k, const Pose2& odometry, std::span<const sim::Detection> detections,
                                 std::span<const InterVehicleMeasurement> inter_vehicle) {
  BackendStep out;
  out.step = k;
  if (last_keyframe_ < 0) {
    const VariableId x0 = VariableId::vehicle(vehicle_, k);
    addVariable(x0, since_keyframe_);
    graph_.addFactor(makePosePrior(x0, since_keyframe_, params_.noise.anchor.inverse()));
    last_keyframe_ = k;
    since_keyframe_ = Pose2::identity();
    out.keyframe = true;
  } else {
    if (k <= last_keyframe_) throw std::invalid_argument("SlammotBackend::step: steps must increase");
    since_keyframe_ = compose(since_keyframe_, odometry);
    if (isKeyframe(k)) {
      const VariableId prev = VariableId::vehicle(vehicle_, last_keyframe_);
      const VariableId cur = VariableId::vehicle(vehicle_, k);
      addVariable(cur, compose(values_.pose(prev), since_keyframe_));
      graph_.addFactor(makeOdometry(prev, cur, since_keyframe_, params_.noise.odometry.inverse()));
      last_keyframe_ = k;
      since_keyframe_ = Pose2::identity();
      out.keyframe = true;
    }
  }

  const VariableId ego = VariableId::vehicle(vehicle_, last_keyframe_);
  for (const auto& m : inter_vehicle) {
    const Pose2 at_keyframe = compose(m.x_en, inverse(since_keyframe_));
    graph_.addFactor(makeInterVehicle(ego, at_keyframe, m.covariance.inverse()));
  }

  extendTracks(k);
  std::vector<std::pair<std::size_t, sim::Detection>> mixture_factors;
  associate(k, detections, mixture_factors);

  const Estimate est = optimize(graph_, values_, params_.optimizer);
  out.iterations = est.iterations;
  out.cost = est.final_cost;
  out.status = est.status;
  out.diagnostics = est.diagnostics;
  if (est.status != OptimizerStatus::kFailed) values_ = est.values;

  updateLifecycle(k, mixture_factors);

  out.ego = currentEgo();
  for (const auto& [id, track] : tracks_) {
    if (!track.active || track.last_stamp != k) continue;
    TrackEstimate te;
    te.track = id;
    te.world = values_.pose(VariableId::object(id, k));
    te.in_ego = between(out.ego, te.world);
    te.velocity = values_.velocity(VariableId::velocity(id, k));
    te.length = track.length;
    te.width = track.width;
    te.confidence = track.confidence;
    out.tracks.push_back(te);
  }
  slide(k);
  return out;
}

std::map<int, Pose2> SlammotBackend::keyframeEstimates() const {
  std::map<int, Pose2> out = finalized_;
  for (const auto& id : graph_.variables()) {
    if (id.kind == VariableKind::kVehiclePose) out[id.stamp] = values_.pose(id);
  }
  return out;
}

}  // namespace cslammot::graph
