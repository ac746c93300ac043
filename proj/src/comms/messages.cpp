#include "cslammot/comms/messages.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cslammot::comms {

Channel channelOf(MessageKind kind) {
  switch (kind) {
    case MessageKind::kConfidenceMap:
    case MessageKind::kSelectedDetections: return Channel::kPerception;
    default: return Channel::kSlam;
  }
}

std::string toString(MessageKind kind) {
  switch (kind) {
    case MessageKind::kDescriptorRequest: return "DescriptorRequest";
    case MessageKind::kConfidenceMap: return "ConfidenceMapMsg";
    case MessageKind::kLocalFeatures: return "LocalFeatures";
    case MessageKind::kSelectedDetections: return "SelectedDetections";
    case MessageKind::kPoseUpdate: return "PoseUpdate";
  }
  return "Unknown";
}

std::string toString(Channel channel) { return channel == Channel::kSlam ? "slam" : "perception"; }

namespace {

class Writer {
 public:
  explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }
  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw std::invalid_argument("decode: truncated message");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint16_t checkedCount(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint16_t>::max()) {
    throw std::length_error(std::string(what) + ": element count exceeds the 16-bit header field");
  }
  return static_cast<std::uint16_t>(n);
}

std::size_t featureDim(const LocalFeaturesPayload& p) { return p.features.empty() ? 0 : p.features.front().descriptor.size(); }

Message withHeader(int sender, std::uint32_t receiver, int step, MessageKind kind, std::size_t count, Payload payload) {
  Message m;
  m.header.sender = static_cast<std::uint32_t>(sender);
  m.header.receiver = receiver;
  m.header.step = static_cast<std::uint32_t>(step);
  m.header.kind = kind;
  m.header.payload_len = checkedCount(count, "message");
  m.payload = std::move(payload);
  return m;
}

}  // namespace

std::size_t encodedSize(const Message& m) {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DescriptorPayload>) {
          return kHeaderBytes + 4 * p.values.size();
        } else if constexpr (std::is_same_v<T, ConfidenceMapPayload>) {
          return kHeaderBytes + p.cells.size();
        } else if constexpr (std::is_same_v<T, LocalFeaturesPayload>) {
          return kHeaderBytes + p.features.size() * (2 * 4 + 4 * featureDim(p));
        } else if constexpr (std::is_same_v<T, SelectedDetectionsPayload>) {
          return kHeaderBytes + p.records.size() * (4 + 6 * 4);
        } else {
          return kHeaderBytes + 3 * 4 + 6 * 4;
        }
      },
      m.payload);
}

std::vector<std::uint8_t> encode(const Message& m) {
  Writer w(encodedSize(m));
  w.u32(m.header.sender);
  w.u32(m.header.receiver);
  w.u32(m.header.step);
  w.u16(static_cast<std::uint16_t>(m.header.kind));
  w.u16(m.header.payload_len);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DescriptorPayload>) {
          for (float v : p.values) w.f32(v);
        } else if constexpr (std::is_same_v<T, ConfidenceMapPayload>) {
          for (auto c : p.cells) w.u8(c);
        } else if constexpr (std::is_same_v<T, LocalFeaturesPayload>) {
          const std::size_t d = featureDim(p);
          for (const auto& f : p.features) {
            if (f.descriptor.size() != d) throw std::invalid_argument("encode: mixed descriptor sizes");
            w.f32(f.x);
            w.f32(f.y);
            for (float v : f.descriptor) w.f32(v);
          }
        } else if constexpr (std::is_same_v<T, SelectedDetectionsPayload>) {
          for (const auto& r : p.records) {
            w.u32(r.cell);
            w.f32(r.x);
            w.f32(r.y);
            w.f32(r.yaw);
            w.f32(r.length);
            w.f32(r.width);
            w.f32(r.confidence);
          }
        } else {
          w.f32(p.x);
          w.f32(p.y);
          w.f32(p.yaw);
          for (float c : p.covariance) w.f32(c);
        }
      },
      m.payload);
  return w.take();
}

Message decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Message m;
  m.header.sender = r.u32();
  m.header.receiver = r.u32();
  m.header.step = r.u32();
  const std::uint16_t kind = r.u16();
  m.header.payload_len = r.u16();
  const std::size_t n = m.header.payload_len;
  switch (kind) {
    case static_cast<std::uint16_t>(MessageKind::kDescriptorRequest): {
      m.header.kind = MessageKind::kDescriptorRequest;
      DescriptorPayload p;
      p.values.resize(n);
      for (auto& v : p.values) v = r.f32();
      m.payload = std::move(p);
      break;
    }
    case static_cast<std::uint16_t>(MessageKind::kConfidenceMap): {
      m.header.kind = MessageKind::kConfidenceMap;
      ConfidenceMapPayload p;
      p.cells.resize(n);
      for (auto& c : p.cells) c = r.u8();
      m.payload = std::move(p);
      break;
    }
    case static_cast<std::uint16_t>(MessageKind::kLocalFeatures): {
      m.header.kind = MessageKind::kLocalFeatures;
      LocalFeaturesPayload p;
      if (n > 0) {
        const std::size_t per = r.remaining() / n;
        if (per < 8 || per % 4 != 0 || per * n != r.remaining()) {
          throw std::invalid_argument("decode: inconsistent LocalFeatures size");
        }
        const std::size_t d = (per - 8) / 4;
        p.features.resize(n);
        for (auto& f : p.features) {
          f.x = r.f32();
          f.y = r.f32();
          f.descriptor.resize(d);
          for (auto& v : f.descriptor) v = r.f32();
        }
      }
      m.payload = std::move(p);
      break;
    }
    case static_cast<std::uint16_t>(MessageKind::kSelectedDetections): {
      m.header.kind = MessageKind::kSelectedDetections;
      SelectedDetectionsPayload p;
      p.records.resize(n);
      for (auto& rec : p.records) {
        rec.cell = r.u32();
        rec.x = r.f32();
        rec.y = r.f32();
        rec.yaw = r.f32();
        rec.length = r.f32();
        rec.width = r.f32();
        rec.confidence = r.f32();
      }
      m.payload = std::move(p);
      break;
    }
    case static_cast<std::uint16_t>(MessageKind::kPoseUpdate): {
      m.header.kind = MessageKind::kPoseUpdate;
      PoseUpdatePayload p;
      p.x = r.f32();
      p.y = r.f32();
      p.yaw = r.f32();
      for (auto& c : p.covariance) c = r.f32();
      m.payload = p;
      break;
    }
    default: throw std::invalid_argument("decode: unknown message kind " + std::to_string(kind));
  }
  if (r.remaining() != 0) throw std::invalid_argument("decode: trailing bytes");
  return m;
}

Message makeDescriptorMessage(int sender, std::uint32_t receiver, int step, const Eigen::VectorXd& descriptor) {
  DescriptorPayload p;
  p.values.reserve(static_cast<std::size_t>(descriptor.size()));
  for (Eigen::Index i = 0; i < descriptor.size(); ++i) p.values.push_back(static_cast<float>(descriptor[i]));
  const std::size_t n = p.values.size();
  return withHeader(sender, receiver, step, MessageKind::kDescriptorRequest, n, std::move(p));
}

Message makeConfidenceMapMessage(int sender, int step, const perception::ConfidenceMap& map) {
  ConfidenceMapPayload p;
  p.cells.reserve(map.values.size());
  for (double v : map.values) {
    p.cells.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  const std::size_t n = p.cells.size();
  return withHeader(sender, kBroadcast, step, MessageKind::kConfidenceMap, n, std::move(p));
}

Message makeLocalFeaturesMessage(int sender, int receiver, int step, const slam::KeypointSet& keypoints) {
  LocalFeaturesPayload p;
  p.features.reserve(keypoints.points.size());
  for (const auto& k : keypoints.points) {
    FeatureRecord f;
    f.x = static_cast<float>(k.position.x());
    f.y = static_cast<float>(k.position.y());
    f.descriptor.reserve(static_cast<std::size_t>(k.descriptor.size()));
    for (Eigen::Index i = 0; i < k.descriptor.size(); ++i) f.descriptor.push_back(static_cast<float>(k.descriptor[i]));
    p.features.push_back(std::move(f));
  }
  const std::size_t n = p.features.size();
  return withHeader(sender, static_cast<std::uint32_t>(receiver), step, MessageKind::kLocalFeatures, n,
                    std::move(p));
}

Message makeSelectedDetectionsMessage(int sender, int receiver, int step,
                                      const perception::SelectedDetections& payload) {
  SelectedDetectionsPayload p;
  p.records.reserve(payload.entryCount());
  for (const auto& e : payload.entries) {
    DetectionRecord r;
    r.cell = e.cell;
    r.x = static_cast<float>(e.pose.x());
    r.y = static_cast<float>(e.pose.y());
    r.yaw = static_cast<float>(e.pose.yaw());
    r.length = static_cast<float>(e.length);
    r.width = static_cast<float>(e.width);
    r.confidence = static_cast<float>(e.confidence);
    p.records.push_back(r);
  }
  for (std::uint32_t i = 0; i < payload.empty_cells; ++i) {
    DetectionRecord r;
    r.cell = kEmptyCell;
    p.records.push_back(r);
  }
  const std::size_t n = p.records.size();
  return withHeader(sender, static_cast<std::uint32_t>(receiver), step, MessageKind::kSelectedDetections, n,
                    std::move(p));
}

Message makePoseUpdateMessage(int sender, int receiver, int step, const Pose2& pose,
                              const Eigen::Matrix3d& covariance) {
  PoseUpdatePayload p;
  p.x = static_cast<float>(pose.x());
  p.y = static_cast<float>(pose.y());
  p.yaw = static_cast<float>(pose.yaw());
  int i = 0;
  for (int r = 0; r < 3; ++r) {
    for (int c = r; c < 3; ++c) p.covariance[i++] = static_cast<float>(covariance(r, c));
  }
  return withHeader(sender, static_cast<std::uint32_t>(receiver), step, MessageKind::kPoseUpdate, 1, p);
}

namespace {

template <typename T>
const T& payloadAs(const Message& m, const char* what) {
  const T* p = std::get_if<T>(&m.payload);
  if (!p) throw std::invalid_argument(std::string(what) + ": wrong message kind " + toString(m.kind()));
  return *p;
}

}  // namespace

Eigen::VectorXd descriptorOf(const Message& m) {
  const auto& p = payloadAs<DescriptorPayload>(m, "descriptorOf");
  Eigen::VectorXd v(static_cast<Eigen::Index>(p.values.size()));
  for (std::size_t i = 0; i < p.values.size(); ++i) v[static_cast<Eigen::Index>(i)] = p.values[i];
  return v;
}

perception::ConfidenceMap confidenceMapOf(const Message& m, const perception::GridSpec& grid) {
  const auto& p = payloadAs<ConfidenceMapPayload>(m, "confidenceMapOf");
  if (p.cells.size() != static_cast<std::size_t>(grid.cellCount())) {
    throw std::invalid_argument("confidenceMapOf: cell count does not match grid");
  }
  perception::ConfidenceMap map(grid, static_cast<int>(m.header.sender), static_cast<int>(m.header.step));
  for (std::size_t i = 0; i < p.cells.size(); ++i) map.values[i] = p.cells[i] / 255.0;
  return map;
}

slam::KeypointSet keypointsOf(const Message& m) {
  const auto& p = payloadAs<LocalFeaturesPayload>(m, "keypointsOf");
  slam::KeypointSet set;
  set.frame = static_cast<int>(m.header.step);
  set.vehicle = static_cast<int>(m.header.sender);
  for (const auto& f : p.features) {
    slam::Keypoint k;
    k.position = {f.x, f.y};
    k.descriptor.resize(static_cast<Eigen::Index>(f.descriptor.size()));
    for (std::size_t i = 0; i < f.descriptor.size(); ++i) k.descriptor[static_cast<Eigen::Index>(i)] = f.descriptor[i];
    set.points.push_back(std::move(k));
  }
  return set;
}

perception::SelectedDetections detectionsOf(const Message& m) {
  const auto& p = payloadAs<SelectedDetectionsPayload>(m, "detectionsOf");
  perception::SelectedDetections out;
  out.sender = static_cast<int>(m.header.sender);
  out.stamp = static_cast<int>(m.header.step);
  for (const auto& r : p.records) {
    if (r.cell == kEmptyCell) {
      ++out.empty_cells;
      continue;
    }
    perception::DetectionEntry e;
    e.cell = r.cell;
    e.pose = Pose2(r.x, r.y, r.yaw);
    e.length = r.length;
    e.width = r.width;
    e.confidence = r.confidence;
    out.entries.push_back(e);
  }
  return out;
}

Pose2 poseOf(const Message& m) {
  const auto& p = payloadAs<PoseUpdatePayload>(m, "poseOf");
  return {p.x, p.y, p.yaw};
}

Eigen::Matrix3d covarianceOf(const Message& m) {
  const auto& p = payloadAs<PoseUpdatePayload>(m, "covarianceOf");
  Eigen::Matrix3d c;
  int i = 0;
  for (int r = 0; r < 3; ++r) {
    for (int col = r; col < 3; ++col) {
      c(r, col) = p.covariance[i];
      c(col, r) = p.covariance[i];
      ++i;
    }
  }
  return c;
}

}  // namespace cslammot::comms
