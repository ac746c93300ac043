#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cslammot/geometry.hpp"
#include "cslammot/perception/grid.hpp"
#include "cslammot/perception/selection.hpp"
#include "cslammot/slam/keypoints.hpp"

namespace cslammot::comms {

enum class MessageKind : std::uint16_t {
  kDescriptorRequest = 1,
  kConfidenceMap = 2,
  kLocalFeatures = 3,
  kSelectedDetections = 4,
  kPoseUpdate = 5,
};

enum class Channel { kSlam, kPerception };

Channel channelOf(MessageKind kind);
std::string toString(MessageKind kind);
std::string toString(Channel channel);

inline constexpr std::uint32_t kBroadcast = 0xFFFFFFFFu;
inline constexpr std::size_t kHeaderBytes = 16;

/// Wire header: sender u32, receiver u32, step u32, kind u16, payload_len u16, little-endian.
/// payload_len counts payload elements (descriptor values, map cells, keypoints, detection
/// records, or 1 for a pose update).
struct Header {
  std::uint32_t sender = 0;
  std::uint32_t receiver = kBroadcast;
  std::uint32_t step = 0;
  MessageKind kind = MessageKind::kDescriptorRequest;
  std::uint16_t payload_len = 0;
};

/// Place descriptor; a reply carries the matched candidate frame in the header step.
struct DescriptorPayload {
  std::vector<float> values;
};

/// Map cells quantized to 1/255 steps; the grid layout is agreed out of band.
struct ConfidenceMapPayload {
  std::vector<std::uint8_t> cells;
};

struct FeatureRecord {
  float x = 0.0f;
  float y = 0.0f;
  std::vector<float> descriptor;
};

struct LocalFeaturesPayload {
  std::vector<FeatureRecord> features;
};

struct DetectionRecord {
  std::uint32_t cell = 0;
  float x = 0.0f;
  float y = 0.0f;
  float yaw = 0.0f;
  float length = 0.0f;
  float width = 0.0f;
  float confidence = 0.0f;
};

/// Cell value for padding records of a dense payload.
inline constexpr std::uint32_t kEmptyCell = 0xFFFFFFFFu;

struct SelectedDetectionsPayload {
  std::vector<DetectionRecord> records;
};

/// Sender pose and the upper triangle of its 3x3 covariance (xx, xy, xyaw, yy, yyaw, yawyaw).
struct PoseUpdatePayload {
  float x = 0.0f;
  float y = 0.0f;
  float yaw = 0.0f;
  float covariance[6] = {0, 0, 0, 0, 0, 0};
};

using Payload = std::variant<DescriptorPayload, ConfidenceMapPayload, LocalFeaturesPayload,
                             SelectedDetectionsPayload, PoseUpdatePayload>;

struct Message {
  Header header;
  Payload payload;

  MessageKind kind() const { return header.kind; }
};

/// Byte count of the encoded message, computed from the schema.
std::size_t encodedSize(const Message& m);
std::vector<std::uint8_t> encode(const Message& m);
/// Inverse of encode. Throws std::invalid_argument on malformed input.
Message decode(std::span<const std::uint8_t> bytes);

Message makeDescriptorMessage(int sender, std::uint32_t receiver, int step, const Eigen::VectorXd& descriptor);
Message makeConfidenceMapMessage(int sender, int step, const perception::ConfidenceMap& map);
Message makeLocalFeaturesMessage(int sender, int receiver, int step, const slam::KeypointSet& keypoints);
Message makeSelectedDetectionsMessage(int sender, int receiver, int step,
                                      const perception::SelectedDetections& payload);
Message makePoseUpdateMessage(int sender, int receiver, int step, const Pose2& pose,
                              const Eigen::Matrix3d& covariance);

Eigen::VectorXd descriptorOf(const Message& m);
/// Dequantized map on the given grid.
perception::ConfidenceMap confidenceMapOf(const Message& m, const perception::GridSpec& grid);
slam::KeypointSet keypointsOf(const Message& m);
perception::SelectedDetections detectionsOf(const Message& m);
Pose2 poseOf(const Message& m);
Eigen::Matrix3d covarianceOf(const Message& m);

}  // namespace cslammot::comms
