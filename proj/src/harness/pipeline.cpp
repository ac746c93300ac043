#include "cslammot/harness/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <thread>

#include "cslammot/comms/messages.hpp"
#include "cslammot/comms/network.hpp"
#include "cslammot/graph/backend.hpp"
#include "cslammot/harness/report.hpp"
#include "cslammot/harness/sensing.hpp"
#include "cslammot/perception/fusion.hpp"
#include "cslammot/perception/selection.hpp"
#include "cslammot/sim/sensors.hpp"
#include "cslammot/slam/indirect_pose.hpp"
#include "cslammot/slam/keypoints.hpp"
#include "cslammot/slam/place_recognition.hpp"
#include "cslammot/slam/ransac.hpp"

namespace cslammot::harness {

const EgoReport* RunReport::ego(int vehicle) const {
  for (const auto& e : egos) {
    if (e.vehicle == vehicle) return &e;
  }
  return nullptr;
}

std::optional<double> RunReport::meanEgoRmse() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : egos) {
    if (!e.accuracy.rmse) continue;
    sum += *e.accuracy.rmse;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

namespace {

using comms::Message;
using comms::MessageKind;

constexpr double kOdometryVarianceFloor = 1e-8;

Message roundTrip(const Message& m) { return comms::decode(comms::encode(m)); }

/// Odometry integration with first-order covariance propagation.
struct DeadReckoning {
  std::vector<Pose2> poses;
  std::vector<Eigen::Matrix3d> covariances;

  void start(const Pose2& initial) {
    poses.assign(1, initial);
    covariances.assign(1, Eigen::Matrix3d::Zero());
  }
  void advance(const Pose2& odometry, const Eigen::Matrix3d& step_covariance) {
    const auto j = composeJacobians(poses.back(), odometry);
    covariances.push_back(j.wrtA * covariances.back() * j.wrtA.transpose() +
                          j.wrtB * step_covariance * j.wrtB.transpose());
    poses.push_back(compose(poses.back(), odometry));
  }
};

struct PlaceHistory {
  std::map<int, slam::PlaceDescriptor> frames;
  std::map<int, slam::PlaceDescriptor> sequences;
};

/// Keyframe offered by a neighbor in reply to a descriptor broadcast.
struct Offer {
  int neighbor = -1;
  int frame = -1;
  double distance = 0.0;
};

struct SlamLink {
  int frame = -1;
  std::optional<slam::KeypointSet> features;
  std::optional<std::pair<Pose2, Eigen::Matrix3d>> pose;
};

/// Network with per-phase retry queues; only messages delivered at their sending step are used.
class PhasedNetwork {
 public:
  PhasedNetwork(const comms::NetworkModel& model, comms::CommLedger& ledger) : model_(model), ledger_(ledger) {}

  void beginStep() { usage_.reset(); }

  std::vector<comms::Delivery> send(int phase, const std::vector<Message>& outbox, std::span<const Pose2> poses,
                                    int step) {
    std::vector<comms::Envelope> queue = std::move(pending_[phase]);
    pending_[phase].clear();
    for (const auto& m : outbox) queue.push_back({m, step});
    auto result = comms::deliver(queue, model_, poses, step, usage_, ledger_);
    dropped_ += result.dropped;
    pending_[phase] = std::move(result.deferred);
    std::vector<comms::Delivery> fresh;
    for (auto& d : result.delivered) {
      if (d.sent_step != step) {
        ++stale_;
        continue;
      }
      d.message = roundTrip(d.message);
      fresh.push_back(std::move(d));
    }
    return fresh;
  }

  std::size_t dropped() const { return dropped_; }
  std::size_t stale() const { return stale_; }

 private:
  comms::NetworkModel model_;
  comms::CommLedger& ledger_;
  comms::PairUsage usage_;
  std::map<int, std::vector<comms::Envelope>> pending_;
  std::size_t dropped_ = 0;
  std::size_t stale_ = 0;
};

perception::OrientedBox truthBox(const Pose2& ego, const sim::ObjectState& o, const sim::TrackSpec& spec) {
  return {between(ego, o.pose), spec.length, spec.width};
}

class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config)
      : cfg_(config),
        sc_(cfg_.scenario),
        truth_(sim::generateTruth(cfg_.scenario)),
        sensors_(sc_, truth_),
        network_(config.network, result_.ledger) {
    cfg_.validate();
    egos_ = cfg_.egoList();
    const int n = static_cast<int>(sc_.vehicles.size());
    landmark_descriptors_ = slam::landmarkDescriptors(sc_.landmarks.size(), sc_.features.keypoint_descriptor_dim,
                                                      sc_.seed);
    const auto& on = sc_.sensor.odom_noise;
    step_odometry_cov_ = Eigen::Vector3d(on.longitudinal * on.longitudinal, on.lateral * on.lateral, on.yaw * on.yaw)
                             .asDiagonal();
    params_ = cfg_.backend;
    params_.dt = sc_.dt;
    params_.keyframe_stride = sc_.keyframe_stride;
    if (cfg_.calibrate_odometry_noise) {
      Eigen::Matrix3d kf = static_cast<double>(sc_.keyframe_stride) * step_odometry_cov_;
      for (int i = 0; i < 3; ++i) kf(i, i) = std::max(kf(i, i), kOdometryVarianceFloor);
      params_.noise.odometry = kf;
    }
    dr_.resize(static_cast<std::size_t>(n));
    places_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) dr_[static_cast<std::size_t>(v)].start(truth_.vehicles[static_cast<std::size_t>(v)][0].pose);
    for (int e : egos_) {
      backends_.emplace(e, std::make_unique<graph::SlammotBackend>(e, params_, truthPose(e, 0)));
      EgoReport r;
      r.vehicle = e;
      ego_reports_.emplace(e, r);
    }
  }

  RunResult run() {
    const auto start = std::chrono::steady_clock::now();
    for (int k = 0; k < sc_.duration_steps; ++k) step(k);
    finish();
    result_.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(result_);
  }

 private:
  int vehicleCount() const { return static_cast<int>(sc_.vehicles.size()); }
  const Pose2& truthPose(int v, int k) const {
    return truth_.vehicles[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)].pose;
  }
  bool isKeyframe(int k) const { return k % sc_.keyframe_stride == 0; }

  Pose2 relativePose(int ego, int other, int k) const {
    if (cfg_.perfect_pose_warping) return between(truthPose(ego, k), truthPose(other, k));
    return between(dr_[static_cast<std::size_t>(ego)].poses[static_cast<std::size_t>(k)],
                   dr_[static_cast<std::size_t>(other)].poses[static_cast<std::size_t>(k)]);
  }

  slam::KeypointSet keypointsAt(int v, int frame) const {
    slam::KeypointParams p;
    p.descriptor_dim = sc_.features.keypoint_descriptor_dim;
    p.position_noise = sc_.features.keypoint_position_noise;
    p.descriptor_noise = sc_.features.keypoint_descriptor_noise;
    p.range = sc_.features.landmark_range;
    p.fov = sc_.sensor.fov;
    Rng rng = makeRng(sc_.seed, {kKeypointStream, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(frame)});
    return slam::extractKeypoints(truthPose(v, frame), sc_.landmarks, sc_.occluders, landmark_descriptors_, p, v,
                                  frame, rng);
  }

  void sense(int k) {
    const int n = vehicleCount();
    odometry_.assign(static_cast<std::size_t>(n), Pose2());
    detections_.assign(static_cast<std::size_t>(n), {});
    maps_.assign(static_cast<std::size_t>(n), {});
    for (int v = 0; v < n; ++v) {
      const auto vi = static_cast<std::size_t>(v);
      const Pose2& pose = truthPose(v, k);
      if (k > 0) {
        odometry_[vi] = sensors_.odometry(v, k);
        dr_[vi].advance(odometry_[vi], step_odometry_cov_);
      }
      detections_[vi] = sensors_.detections(v, k);
      maps_[vi] = sim::confidenceMap(v, k, detections_[vi], sc_.grid);
      if (isKeyframe(k)) {
        slam::PlaceDescriptorParams pp;
        pp.dim = sc_.features.descriptor_dim;
        pp.range = sc_.features.landmark_range;
        pp.fov = sc_.sensor.fov;
        pp.noise = sc_.features.descriptor_noise;
        Rng rng = makeRng(sc_.seed, {kDescriptorStream, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(k)});
        auto& hist = places_[vi];
        hist.frames[k] = slam::placeDescriptor(pose, sc_.landmarks, sc_.occluders, pp, v, k, rng);
        std::vector<slam::PlaceDescriptor> window;
        for (auto it = hist.frames.rbegin(); it != hist.frames.rend() && static_cast<int>(window.size()) <
                                                                               cfg_.selection.sequence_window;
             ++it) {
          window.push_back(it->second);
        }
        std::reverse(window.begin(), window.end());
        auto seq = slam::sequenceDescriptor(window);
        seq.frame = k;
        seq.vehicle = v;
        hist.sequences[k] = std::move(seq);
      }
    }
  }

  std::vector<Pose2> truePoses(int k) const {
    std::vector<Pose2> out;
    for (int v = 0; v < vehicleCount(); ++v) out.push_back(truthPose(v, k));
    return out;
  }

  void step(int k) {
    sense(k);
    const auto poses = truePoses(k);
    network_.beginStep();
    const bool slam_round = usesSlamChannel(cfg_.mode) && cfg_.selection.k_collaborators > 0 && isKeyframe(k) &&
                            vehicleCount() > 1;
    const bool perception_round = usesPerceptionChannel(cfg_.mode) && vehicleCount() > 1;
    const bool selective = cfg_.perception == PerceptionProtocol::kSelective;

    // Phase 1.
    std::vector<Message> outbox;
    if (slam_round) {
      for (int e : egos_) {
        outbox.push_back(comms::makeDescriptorMessage(e, comms::kBroadcast, k, sequenceOf(e, k).values));
      }
    }
    if (perception_round && selective) {
      for (int v = 0; v < vehicleCount(); ++v) {
        if (hasOtherEgo(v)) outbox.push_back(comms::makeConfidenceMapMessage(v, k, maps_[static_cast<std::size_t>(v)]));
      }
    }
    std::map<int, std::vector<std::pair<int, Eigen::VectorXd>>> queries;  // receiver -> (ego, descriptor)
    std::map<std::pair<int, int>, perception::ConfidenceMap> received_maps;  // (receiver, sender)
    for (const auto& d : network_.send(1, outbox, poses, k)) {
      const int sender = static_cast<int>(d.message.header.sender);
      if (d.message.kind() == MessageKind::kDescriptorRequest) {
        queries[d.receiver].emplace_back(sender, comms::descriptorOf(d.message));
      } else if (d.message.kind() == MessageKind::kConfidenceMap) {
        received_maps[{d.receiver, sender}] = comms::confidenceMapOf(d.message, sc_.grid);
      }
    }

    // Phase 2: each neighbor offers its best-matching keyframe.
    outbox.clear();
    for (const auto& [n, list] : queries) {
      const auto& seqs = places_[static_cast<std::size_t>(n)].sequences;
      if (seqs.empty()) continue;
      for (const auto& [e, query] : list) {
        slam::PlaceDescriptor q;
        q.values = query;
        slam::CandidateList cands{n, {}};
        for (const auto& [f, s] : seqs) cands.frames.push_back(s);
        const auto ranked = slam::rankCollaborators(q, std::span<const slam::CandidateList>(&cands, 1));
        if (ranked.empty()) continue;
        const int f = ranked.front().frame;
        outbox.push_back(comms::makeDescriptorMessage(n, static_cast<std::uint32_t>(e), f, seqs.at(f).values));
      }
    }
    std::map<int, std::vector<Offer>> offers;
    for (const auto& d : network_.send(2, outbox, poses, k)) {
      if (d.message.kind() != MessageKind::kDescriptorRequest) continue;
      slam::PlaceDescriptor reply;
      reply.values = comms::descriptorOf(d.message);
      const int n = static_cast<int>(d.message.header.sender);
      offers[d.receiver].push_back(
          {n, static_cast<int>(d.message.header.step), slam::descriptorDistance(sequenceOf(d.receiver, k), reply)});
    }

    // Phase 3.
    outbox.clear();
    std::map<std::pair<int, int>, slam::KeypointSet> sent_features;  // (neighbor, frame), evaluation only
    for (auto& [e, list] : offers) {
      std::stable_sort(list.begin(), list.end(), [](const Offer& a, const Offer& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.neighbor < b.neighbor);
      });
      if (list.empty() || list.front().distance > cfg_.selection.place_threshold) continue;
      const std::size_t take = std::min(list.size(), static_cast<std::size_t>(cfg_.selection.k_collaborators));
      for (std::size_t i = 0; i < take; ++i) {
        const auto& o = list[i];
        auto kp = keypointsAt(o.neighbor, o.frame);
        const auto& nd = dr_[static_cast<std::size_t>(o.neighbor)];
        outbox.push_back(comms::makeLocalFeaturesMessage(o.neighbor, e, o.frame, kp));
        outbox.push_back(comms::makePoseUpdateMessage(o.neighbor, e, o.frame, ownEstimate(o.neighbor, o.frame),
                                                      nd.covariances[static_cast<std::size_t>(o.frame)]));
        sent_features[{o.neighbor, o.frame}] = std::move(kp);
      }
    }
    if (perception_round) planPerception(k, selective, received_maps, outbox);

    std::map<std::pair<int, int>, SlamLink> links;  // (ego, neighbor)
    std::map<int, std::vector<std::vector<sim::Detection>>> received;
    for (const auto& d : network_.send(3, outbox, poses, k)) {
      const int sender = static_cast<int>(d.message.header.sender);
      const auto& m = d.message;
      switch (m.kind()) {
        case MessageKind::kLocalFeatures: {
          auto& link = links[{d.receiver, sender}];
          link.frame = static_cast<int>(m.header.step);
          link.features = comms::keypointsOf(m);
          break;
        }
        case MessageKind::kPoseUpdate: {
          auto& link = links[{d.receiver, sender}];
          link.frame = static_cast<int>(m.header.step);
          link.pose = std::make_pair(comms::poseOf(m), comms::covarianceOf(m));
          break;
        }
        case MessageKind::kSelectedDetections:
          received[d.receiver].push_back(
              perception::warpToEgo(comms::detectionsOf(m), relativePose(d.receiver, sender, k)));
          ++ego_reports_.at(d.receiver).perception_links;
          break;
        default:
          break;
      }
    }

    // Estimation and evaluation.
    for (int e : egos_) {
      std::vector<graph::InterVehicleMeasurement> measurements;
      for (const auto& [key, link] : links) {
        if (key.first != e || !link.features || !link.pose) continue;
        auto m = interVehicle(e, key.second, k, link, sent_features.at({key.second, link.frame}));
        if (m) measurements.push_back(*m);
      }
      ego_reports_.at(e).inter_vehicle_factors += measurements.size();
      const auto ei = static_cast<std::size_t>(e);
      const auto fused = perception::fuseDetections(detections_[ei], received[e]);
      const auto out = backends_.at(e)->step(k, odometry_[ei], fused, measurements);
      if (out.status == graph::OptimizerStatus::kFailed) {
        throw std::runtime_error("optimizer failure at step " + std::to_string(k) + " (vehicle " +
                                 std::to_string(e) + "): " + out.diagnostics);
      }
      evaluate(e, k, fused, out);
    }
  }

  bool hasOtherEgo(int v) const {
    return std::any_of(egos_.begin(), egos_.end(), [v](int e) { return e != v; });
  }

  const slam::PlaceDescriptor& sequenceOf(int v, int k) const {
    return places_[static_cast<std::size_t>(v)].sequences.at(k);
  }

  void planPerception(int k, bool selective,
                      const std::map<std::pair<int, int>, perception::ConfidenceMap>& received_maps,
                      std::vector<Message>& outbox) const {
    const auto& sel = cfg_.selection;
    std::optional<std::size_t> entry_cap;
    if (sel.perception_budget_bytes) {
      const std::uint64_t b = *sel.perception_budget_bytes;
      entry_cap = b < comms::kHeaderBytes ? 0 : static_cast<std::size_t>((b - comms::kHeaderBytes) / 28);
    }
    for (int n = 0; n < vehicleCount(); ++n) {
      const auto ni = static_cast<std::size_t>(n);
      for (int e : egos_) {
        if (e == n) continue;
        const Pose2 n_in_e = relativePose(e, n, k);
        perception::SelectedDetections payload;
        if (selective) {
          // The neighbor evaluates the ego's broadcast map against its own.
          auto it = received_maps.find({n, e});
          if (it == received_maps.end()) continue;
          const auto& ego_map = it->second;
          const auto warped = perception::warpMap(maps_[ni], n_in_e, sc_.grid);
          const auto decision = perception::decideVehicle(perception::dynamicMask(ego_map, sel.dynamic_threshold),
                                                          perception::dynamicMask(warped, sel.dynamic_threshold),
                                                          sel.complementarity_iou);
          if (!decision.selected) continue;
          const auto area = perception::selectAreas(warped, perception::requestMap(ego_map), sel.min_score,
                                                    sel.max_cells);
          payload = perception::packSelected(detections_[ni], area, n_in_e, n, k);
        } else {
          payload = perception::packDense(detections_[ni], sc_.grid, n_in_e, n, k);
        }
        if (entry_cap) {
          auto& es = payload.entries;
          std::stable_sort(es.begin(), es.end(), [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
          if (es.size() > *entry_cap) es.resize(*entry_cap);
          payload.empty_cells = static_cast<std::uint32_t>(
              std::min<std::size_t>(payload.empty_cells, *entry_cap - es.size()));
        }
        if (payload.entryCount() == 0) continue;
        outbox.push_back(comms::makeSelectedDetectionsMessage(n, e, k, payload));
      }
    }
  }

  /// A vehicle's own estimate of its pose at `frame`: its latest keyframe estimate at or
  /// before the frame, extended by odometry; odometry alone when it runs no estimator.
  Pose2 ownEstimate(int v, int frame) const {
    const auto& d = dr_[static_cast<std::size_t>(v)].poses;
    const Pose2& at_frame = d[static_cast<std::size_t>(frame)];
    auto it = backends_.find(v);
    if (it == backends_.end()) return at_frame;
    const auto estimates = it->second->keyframeEstimates();
    auto kf = estimates.upper_bound(frame);
    if (kf == estimates.begin()) return at_frame;
    --kf;
    return compose(kf->second, between(d[static_cast<std::size_t>(kf->first)], at_frame));
  }

  std::optional<graph::InterVehicleMeasurement> interVehicle(int e, int n, int k, const SlamLink& link,
                                                             const slam::KeypointSet& neighbor_truth) {
    const auto own = keypointsAt(e, k);
    const auto& theirs = *link.features;
    const auto matches = slam::matchKeypoints(own, theirs, cfg_.selection.match_ratio);

    MatchCounts counts;
    counts.matches = matches.size();
    std::set<int> own_landmarks;
    for (const auto& p : own.points) own_landmarks.insert(p.landmark);
    for (const auto& p : neighbor_truth.points) counts.possible += own_landmarks.count(p.landmark);
    for (const auto& m : matches) {
      const int a = own.points[static_cast<std::size_t>(m.query)].landmark;
      const int b = neighbor_truth.points[static_cast<std::size_t>(m.candidate)].landmark;
      counts.correct += (a == b && a >= 0) ? 1 : 0;
    }
    result_.report.keypoints += counts;

    std::vector<slam::PointPair> pairs;
    pairs.reserve(matches.size());
    for (const auto& m : matches) {
      pairs.push_back({own.points[static_cast<std::size_t>(m.query)].position,
                       theirs.points[static_cast<std::size_t>(m.candidate)].position});
    }
    Rng rng = makeRng(sc_.seed, {kRansacStream, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(k),
                                 static_cast<std::uint64_t>(n)});
    const auto outcome = slam::ransacTransform(pairs, cfg_.ransac, rng);
    if (!outcome.ok()) return std::nullopt;
    const Pose2 ego_in_neighbor(outcome.result->delta_t);
    Eigen::Matrix3d rel_cov = outcome.result->covariance;
    for (int i = 0; i < 3; ++i) rel_cov(i, i) = std::max(rel_cov(i, i), params_.noise.inter_vehicle_floor(i));
    const auto& [x_n, cov_n] = *link.pose;
    graph::InterVehicleMeasurement m;
    m.neighbor = n;
    m.x_en = compose(x_n, ego_in_neighbor);
    // The neighbor's pose error is shared by every factor it contributes within the window.
    const double shared = static_cast<double>(std::max(1, params_.horizon / params_.keyframe_stride));
    m.covariance = slam::indirectCovariance(x_n, shared * cov_n, ego_in_neighbor, rel_cov);
    return m;
  }

  void evaluate(int e, int k, const std::vector<sim::Detection>& fused, const graph::BackendStep& out) {
    const Pose2& ego = truthPose(e, k);
    std::vector<perception::OrientedBox> gt;
    std::vector<TrackedBox> gt_tracked;
    std::vector<std::size_t> gt_index;
    for (std::size_t i = 0; i < truth_.objects.size(); ++i) {
      const auto box = truthBox(ego, truth_.objects[i][static_cast<std::size_t>(k)], sc_.objects[i]);
      if (!sc_.grid.cellIndexOf(box.pose.translation())) continue;
      gt.push_back(box);
      gt_tracked.push_back({sc_.objects[i].id, box});
      gt_index.push_back(i);
    }
    std::vector<ScoredBox> dets;
    for (const auto& d : fused) {
      if (!sc_.grid.cellIndexOf(d.pose_in_vehicle.translation())) continue;
      dets.push_back({perception::boxOf(d), d.confidence});
    }
    det_frames_.push_back(std::move(dets));
    truth_frames_.push_back(gt);

    std::vector<TrackedBox> tracks;
    std::vector<const graph::TrackEstimate*> track_refs;
    for (const auto& t : out.tracks) {
      result_.tracks.push_back({k, e, t.track, t.in_ego, t.velocity.v, t.velocity.omega});
      if (!sc_.grid.cellIndexOf(t.in_ego.translation())) continue;
      tracks.push_back({t.track, {t.in_ego, t.length, t.width}});
      track_refs.push_back(&t);
    }
    // Ids are made unique per ego so that switches never cross egos.
    const int id_base = e * 1000000;
    for (auto& t : tracks) t.id += id_base;
    for (auto& g : gt_tracked) g.id += id_base;
    const auto frame = mota({tracks}, {gt_tracked});
    mota_.push_back({std::move(tracks), std::move(gt_tracked)});
    for (const auto& m : frame.matches) {
      const auto& obj = truth_.objects[gt_index[m.truth]][static_cast<std::size_t>(k)];
      const auto* est = track_refs[m.track];
      object_samples_.push_back({between(ego, obj.pose), obj.v, est->in_ego, est->velocity.v});
    }

    result_.trajectory.push_back({k, e, out.ego, dr_[static_cast<std::size_t>(e)].poses.back(), ego});
  }

  void placeQueries() {
    std::vector<PlaceQuery> queries;
    for (int e : egos_) {
      for (const auto& [k, q] : places_[static_cast<std::size_t>(e)].sequences) {
        PlaceQuery pq;
        pq.position = truthPose(e, k).translation();
        for (int n = 0; n < vehicleCount(); ++n) {
          if (n == e) continue;
          for (const auto& [f, c] : places_[static_cast<std::size_t>(n)].sequences) {
            if (f > k) break;
            pq.candidates.push_back({slam::descriptorDistance(q, c), truthPose(n, f).translation()});
          }
        }
        if (!pq.candidates.empty()) queries.push_back(std::move(pq));
      }
    }
    result_.report.place = placeRecognitionMetrics(queries);
  }

  void finish() {
    auto& rep = result_.report;
    rep.scenario = sc_.name;
    rep.seed = sc_.seed;
    rep.mode = cfg_.mode;
    rep.perception = cfg_.perception;
    rep.k_collaborators = cfg_.selection.k_collaborators;
    rep.perception_budget_bytes = cfg_.selection.perception_budget_bytes;

    for (int e : egos_) {
      auto r = ego_reports_.at(e);
      const auto estimates = backends_.at(e)->keyframeEstimates();
      std::map<int, Pose2> truth;
      std::map<int, Pose2> dead;
      for (const auto& [k, est] : estimates) {
        truth[k] = truthPose(e, k);
        dead[k] = dr_[static_cast<std::size_t>(e)].poses[static_cast<std::size_t>(k)];
        result_.keyframes.push_back({k, e, est, dead[k], truth[k]});
      }
      r.accuracy = egoAccuracy(estimates, truth);
      r.dead_reckoning = egoAccuracy(dead, truth);
      rep.egos.push_back(r);
    }

    for (std::size_t i = 0; i < kApThresholds.size(); ++i) {
      rep.ap[i] = apAtIou(det_frames_, truth_frames_, kApThresholds[i]);
    }
    rep.detection_recall = detectionRecall(det_frames_, truth_frames_, 0.5);
    std::vector<std::vector<TrackedBox>> tracks;
    std::vector<std::vector<TrackedBox>> gts;
    for (auto& [t, g] : mota_) {
      tracks.push_back(std::move(t));
      gts.push_back(std::move(g));
    }
    rep.mota_counts = mota(tracks, gts);
    rep.mota = rep.mota_counts.value();
    rep.objects = objectRmse(object_samples_);
    placeQueries();

    const auto& ledger = result_.ledger;
    rep.slam_bytes = ledger.total(comms::Channel::kSlam);
    rep.perception_bytes = ledger.total(comms::Channel::kPerception);
    rep.slam_commvol = comms::commVol(rep.slam_bytes);
    rep.perception_commvol = comms::commVol(rep.perception_bytes);
    rep.total_commvol = comms::commVol(ledger.total());
    rep.messages_dropped = network_.dropped();
    rep.messages_stale = network_.stale();
  }

  RunConfig cfg_;
  const sim::Scenario& sc_;
  sim::WorldTruth truth_;
  SensorSuite sensors_;
  RunResult result_;
  PhasedNetwork network_;
  graph::BackendParams params_;
  std::vector<int> egos_;
  std::vector<Eigen::VectorXd> landmark_descriptors_;
  Eigen::Matrix3d step_odometry_cov_;
  std::vector<DeadReckoning> dr_;
  std::vector<PlaceHistory> places_;
  std::map<int, std::unique_ptr<graph::SlammotBackend>> backends_;
  std::map<int, EgoReport> ego_reports_;

  std::vector<Pose2> odometry_;
  std::vector<std::vector<sim::Detection>> detections_;
  std::vector<perception::ConfidenceMap> maps_;

  DetectionFrames det_frames_;
  TruthFrames truth_frames_;
  std::vector<std::pair<std::vector<TrackedBox>, std::vector<TrackedBox>>> mota_;
  std::vector<ObjectSample> object_samples_;
};

}  // namespace

RunResult runPipeline(const RunConfig& config) { return Pipeline(config).run(); }

RunReport run(const RunConfig& config) {
  RunResult result = runPipeline(config);
  if (!config.output_dir.empty()) writeOutputs(config.output_dir, config, result);
  return result.report;
}

std::vector<RunResult> runAll(const std::vector<RunConfig>& configs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));
  std::vector<std::optional<RunResult>> slots(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        slots[i] = runPipeline(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::vector<RunResult> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

}  // namespace cslammot::harness
