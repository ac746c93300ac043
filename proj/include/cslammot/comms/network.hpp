#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cslammot/comms/ledger.hpp"
#include "cslammot/comms/messages.hpp"
#include "cslammot/geometry.hpp"

namespace cslammot::comms {

struct NetworkModel {
  /// Bytes per step per ordered (sender, receiver) pair.
  double pair_budget_bytes = std::numeric_limits<double>::infinity();
  double max_comm_range = 300.0;
  /// Deferred messages older than this many steps are discarded.
  int max_deferral_steps = 1;

  bool valid() const { return pair_budget_bytes >= 0.0 && max_comm_range >= 0.0 && max_deferral_steps >= 0; }
};

/// Outgoing message plus the step it was first queued.
struct Envelope {
  Message message;
  int sent_step = 0;
};

struct Delivery {
  int receiver = -1;
  Message message;
  int sent_step = 0;
};

struct DeliveryResult {
  std::vector<Delivery> delivered;
  std::vector<Envelope> deferred;
  std::size_t dropped = 0;
};

/// Bytes already used this step per (sender, receiver); shared across the phases of one step.
class PairUsage {
 public:
  std::uint64_t used(int sender, int receiver) const;
  void add(int sender, int receiver, std::uint64_t bytes) { usage_[{sender, receiver}] += bytes; }
  void reset() { usage_.clear(); }

 private:
  std::map<std::pair<int, int>, std::uint64_t> usage_;
};

/// Delivers in outbox order. Receivers beyond max_comm_range (true positions) are dropped;
/// a message that would exceed its pair budget is deferred. Broadcasts go to every other
/// in-range vehicle and are ledgered once when at least one copy is delivered; copies that
/// do not fit are deferred as unicast messages. Only delivered bytes reach the ledger.
DeliveryResult deliver(std::span<const Envelope> outbox, const NetworkModel& net,
                       std::span<const Pose2> true_poses, int step, PairUsage& usage, CommLedger& ledger);

/// Messages exchanged with one neighbor during a handshake.
struct NeighborExchange {
  int neighbor = -1;
  std::optional<Message> descriptor_reply;
  std::optional<Message> confidence_map_reply;
  bool slam_selected = false;
  std::vector<Message> slam_messages;
  bool perception_selected = false;
  std::optional<Message> selected_detections;
};

struct PlannedMessage {
  int phase = 1;
  Message message;
};

/// Phase 1: the ego's descriptor and confidence-map broadcasts. Phase 2: neighbor replies.
/// Phase 3: local features and pose updates from SLAM-selected neighbors, then selected
/// detections from perception-selected neighbors. Unselected neighbors contribute nothing
/// to phase 3.
std::vector<PlannedMessage> handshakeRound(const Message& descriptor_request, const Message& confidence_map,
                                           std::span<const NeighborExchange> neighbors);

}  // namespace cslammot::comms
