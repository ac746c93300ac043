#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cslammot/geometry.hpp"
#include "cslammot/perception/box.hpp"

namespace cslammot::harness {

/// Translational error statistics; unset when no step is shared.
struct ErrorStats {
  std::optional<double> mean;
  std::optional<double> rmse;
  std::size_t count = 0;
};

/// Errors over the steps present in both maps.
ErrorStats egoAccuracy(const std::map<int, Pose2>& estimates, const std::map<int, Pose2>& truth);
ErrorStats errorStats(std::span<const double> errors);

struct ScoredBox {
  perception::OrientedBox box;
  double confidence = 1.0;
};

/// Per-frame detections and ground truth, same frame count.
using DetectionFrames = std::vector<std::vector<ScoredBox>>;
using TruthFrames = std::vector<std::vector<perception::OrientedBox>>;

/// Confidence-sorted greedy matching (each truth matched once, best IoU >= threshold),
/// area under the all-point interpolated precision-recall curve. Unset without ground truth.
std::optional<double> apAtIou(const DetectionFrames& detections, const TruthFrames& truth, double iou_threshold);

struct RecallCount {
  std::size_t matched = 0;
  std::size_t truth = 0;
  std::optional<double> value() const;
};

/// Truth boxes matched by a detection at IoU >= threshold (same greedy matching as AP).
RecallCount detectionRecall(const DetectionFrames& detections, const TruthFrames& truth, double iou_threshold);

struct TrackedBox {
  int id = -1;
  perception::OrientedBox box;
};

/// Per-frame assignment of tracks to truth.
struct MotaResult {
  std::size_t gt = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t id_switches = 0;
  /// (frame, track index, truth index) of every match.
  struct Match {
    std::size_t frame;
    std::size_t track;
    std::size_t truth;
  };
  std::vector<Match> matches;
  std::optional<double> value() const;
};

/// Greedy IoU assignment per frame (pairs by descending IoU, IoU >= threshold); an id switch
/// is a truth matched to a different track id than at its previous match.
MotaResult mota(const std::vector<std::vector<TrackedBox>>& tracks,
                const std::vector<std::vector<TrackedBox>>& truth, double iou_threshold = 0.5);

struct ObjectSample {
  Pose2 truth;
  double truth_speed = 0.0;
  Pose2 estimate;
  double estimate_speed = 0.0;
};

struct ObjectErrors {
  std::optional<double> longitudinal;
  std::optional<double> lateral;
  std::optional<double> yaw;
  std::optional<double> velocity;
  std::size_t count = 0;
};

/// RMSE of the position error in the truth heading frame, wrapped yaw and speed error.
/// Unset with fewer than two samples.
ObjectErrors objectRmse(std::span<const ObjectSample> samples);

struct PlaceCandidate {
  double distance = 0.0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct PlaceQuery {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  std::vector<PlaceCandidate> candidates;
};

struct PlaceMetrics {
  std::optional<double> recall_at_1;
  std::optional<double> recall_at_3;
  std::optional<double> auc;
};

/// A pair is positive when the true positions are within `positive_radius`. Recall@k counts
/// queries whose k nearest candidates contain a positive (queries without one count as
/// misses). AUC sweeps the distance threshold over all pairs: sum of precision times the
/// recall increment, tied distances entering together. Unset without queries (AUC: without
/// positives).
PlaceMetrics placeRecognitionMetrics(std::span<const PlaceQuery> queries, double positive_radius = 10.0);

struct MatchCounts {
  std::size_t matches = 0;
  std::size_t correct = 0;
  std::size_t possible = 0;
  std::optional<double> precision() const;
  std::optional<double> recall() const;
  MatchCounts& operator+=(const MatchCounts& o);
};

}  // namespace cslammot::harness
