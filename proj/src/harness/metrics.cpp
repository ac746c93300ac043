#include "cslammot/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace cslammot::harness {

ErrorStats errorStats(std::span<const double> errors) {
  ErrorStats s;
  s.count = errors.size();
  if (errors.empty()) return s;
  double sum = 0.0;
  double sq = 0.0;
  for (double e : errors) {
    sum += e;
    sq += e * e;
  }
  const double n = static_cast<double>(errors.size());
  s.mean = sum / n;
  s.rmse = std::sqrt(sq / n);
  return s;
}

ErrorStats egoAccuracy(const std::map<int, Pose2>& estimates, const std::map<int, Pose2>& truth) {
  std::vector<double> errors;
  for (const auto& [step, est] : estimates) {
    auto it = truth.find(step);
    if (it == truth.end()) continue;
    errors.push_back((est.translation() - it->second.translation()).norm());
  }
  return errorStats(errors);
}

namespace {

void requireSameFrames(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": frame count mismatch");
}

struct Ranked {
  double confidence;
  std::size_t frame;
  std::size_t index;
};

/// Detections of all frames by descending confidence, ties in frame order.
std::vector<Ranked> rankDetections(const DetectionFrames& detections) {
  std::vector<Ranked> ranked;
  for (std::size_t f = 0; f < detections.size(); ++f) {
    for (std::size_t i = 0; i < detections[f].size(); ++i) ranked.push_back({detections[f][i].confidence, f, i});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });
  return ranked;
}

/// Greedy matching in ranked order; returns the TP flag of each ranked detection.
std::vector<bool> matchRanked(const std::vector<Ranked>& ranked, const DetectionFrames& detections,
                              const TruthFrames& truth, double iou_threshold) {
  std::vector<std::vector<bool>> used(truth.size());
  for (std::size_t f = 0; f < truth.size(); ++f) used[f].assign(truth[f].size(), false);
  std::vector<bool> tp(ranked.size(), false);
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& det = detections[ranked[r].frame][ranked[r].index];
    const auto& gts = truth[ranked[r].frame];
    double best = iou_threshold;
    int best_j = -1;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (used[ranked[r].frame][j]) continue;
      const double iou = perception::orientedIou(det.box, gts[j]);
      if (iou >= best) {
        if (best_j < 0 || iou > best) {
          best = iou;
          best_j = static_cast<int>(j);
        }
      }
    }
    if (best_j >= 0) {
      used[ranked[r].frame][static_cast<std::size_t>(best_j)] = true;
      tp[r] = true;
    }
  }
  return tp;
}

std::size_t truthCount(const TruthFrames& truth) {
  std::size_t n = 0;
  for (const auto& f : truth) n += f.size();
  return n;
}

}  // namespace

std::optional<double> apAtIou(const DetectionFrames& detections, const TruthFrames& truth, double iou_threshold) {
  requireSameFrames(detections.size(), truth.size(), "apAtIou");
  const std::size_t total = truthCount(truth);
  if (total == 0) return std::nullopt;
  const auto ranked = rankDetections(detections);
  const auto tp = matchRanked(ranked, detections, truth, iou_threshold);
  const std::size_t n = ranked.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    hits += tp[i] ? 1 : 0;
    precision[i] = static_cast<double>(hits) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(hits) / static_cast<double>(total);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

std::optional<double> RecallCount::value() const {
  if (truth == 0) return std::nullopt;
  return static_cast<double>(matched) / static_cast<double>(truth);
}

RecallCount detectionRecall(const DetectionFrames& detections, const TruthFrames& truth, double iou_threshold) {
  requireSameFrames(detections.size(), truth.size(), "detectionRecall");
  const auto ranked = rankDetections(detections);
  const auto tp = matchRanked(ranked, detections, truth, iou_threshold);
  RecallCount out;
  out.truth = truthCount(truth);
  out.matched = static_cast<std::size_t>(std::count(tp.begin(), tp.end(), true));
  return out;
}

std::optional<double> MotaResult::value() const {
  if (gt == 0) return std::nullopt;
  return 1.0 - static_cast<double>(fn + fp + id_switches) / static_cast<double>(gt);
}

MotaResult mota(const std::vector<std::vector<TrackedBox>>& tracks,
                const std::vector<std::vector<TrackedBox>>& truth, double iou_threshold) {
  requireSameFrames(tracks.size(), truth.size(), "mota");
  MotaResult out;
  std::map<int, int> last_track_of_truth;
  for (std::size_t f = 0; f < truth.size(); ++f) {
    const auto& ts = tracks[f];
    const auto& gs = truth[f];
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t j = 0; j < gs.size(); ++j) {
        const double iou = perception::orientedIou(ts[i].box, gs[j].box);
        if (iou >= iou_threshold) pairs.emplace_back(iou, i, j);
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<bool> track_used(ts.size(), false);
    std::vector<bool> truth_used(gs.size(), false);
    std::size_t matched = 0;
    for (const auto& [iou, i, j] : pairs) {
      if (track_used[i] || truth_used[j]) continue;
      track_used[i] = true;
      truth_used[j] = true;
      ++matched;
      out.matches.push_back({f, i, j});
      auto it = last_track_of_truth.find(gs[j].id);
      if (it != last_track_of_truth.end() && it->second != ts[i].id) ++out.id_switches;
      last_track_of_truth[gs[j].id] = ts[i].id;
    }
    out.gt += gs.size();
    out.fn += gs.size() - matched;
    out.fp += ts.size() - matched;
  }
  return out;
}

ObjectErrors objectRmse(std::span<const ObjectSample> samples) {
  ObjectErrors out;
  out.count = samples.size();
  if (samples.size() < 2) return out;
  double lon = 0.0;
  double lat = 0.0;
  double yaw = 0.0;
  double vel = 0.0;
  for (const auto& s : samples) {
    const Eigen::Vector2d local = s.truth.transformTo(s.estimate.translation());
    lon += local.x() * local.x();
    lat += local.y() * local.y();
    const double dyaw = normalizeAngle(s.estimate.yaw() - s.truth.yaw());
    yaw += dyaw * dyaw;
    const double dv = s.estimate_speed - s.truth_speed;
    vel += dv * dv;
  }
  const double n = static_cast<double>(samples.size());
  out.longitudinal = std::sqrt(lon / n);
  out.lateral = std::sqrt(lat / n);
  out.yaw = std::sqrt(yaw / n);
  out.velocity = std::sqrt(vel / n);
  return out;
}

PlaceMetrics placeRecognitionMetrics(std::span<const PlaceQuery> queries, double positive_radius) {
  PlaceMetrics out;
  if (queries.empty()) return out;
  std::size_t hit1 = 0;
  std::size_t hit3 = 0;
  struct Pair {
    double distance;
    bool positive;
  };
  std::vector<Pair> pairs;
  for (const auto& q : queries) {
    std::vector<std::size_t> order(q.candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return q.candidates[a].distance < q.candidates[b].distance;
    });
    bool in1 = false;
    bool in3 = false;
    for (std::size_t r = 0; r < order.size(); ++r) {
      const auto& c = q.candidates[order[r]];
      const bool positive = (c.position - q.position).norm() <= positive_radius;
      pairs.push_back({c.distance, positive});
      if (positive && r < 1) in1 = true;
      if (positive && r < 3) in3 = true;
    }
    hit1 += in1 ? 1 : 0;
    hit3 += in3 ? 1 : 0;
  }
  const double nq = static_cast<double>(queries.size());
  out.recall_at_1 = static_cast<double>(hit1) / nq;
  out.recall_at_3 = static_cast<double>(hit3) / nq;

  const auto positives = static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const Pair& p) { return p.positive; }));
  if (positives == 0) return out;
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.distance < b.distance; });
  double auc = 0.0;
  double prev_recall = 0.0;
  std::size_t accepted = 0;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j].distance == pairs[i].distance) {
      tp += pairs[j].positive ? 1 : 0;
      ++j;
    }
    accepted = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(accepted);
    auc += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  out.auc = auc;
  return out;
}

std::optional<double> MatchCounts::precision() const {
  if (matches == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(matches);
}

std::optional<double> MatchCounts::recall() const {
  if (possible == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(possible);
}

MatchCounts& MatchCounts::operator+=(const MatchCounts& o) {
  matches += o.matches;
  correct += o.correct;
  possible += o.possible;
  return *this;
}

}  // namespace cslammot::harness
