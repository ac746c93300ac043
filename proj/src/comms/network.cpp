#include "cslammot/comms/network.hpp"

#include <stdexcept>

namespace cslammot::comms {

std::uint64_t PairUsage::used(int sender, int receiver) const {
  auto it = usage_.find({sender, receiver});
  return it == usage_.end() ? 0 : it->second;
}

namespace {

bool inRange(const Pose2& a, const Pose2& b, double range) { return (a.translation() - b.translation()).norm() <= range; }

}  // namespace

DeliveryResult deliver(std::span<const Envelope> outbox, const NetworkModel& net,
                       std::span<const Pose2> true_poses, int step, PairUsage& usage, CommLedger& ledger) {
  if (!net.valid()) throw std::invalid_argument("deliver: invalid network model");
  DeliveryResult result;
  const int n = static_cast<int>(true_poses.size());
  for (const auto& env : outbox) {
    const Message& m = env.message;
    const int sender = static_cast<int>(m.header.sender);
    if (sender < 0 || sender >= n) throw std::out_of_range("deliver: unknown sender");
    if (step - env.sent_step > net.max_deferral_steps) {
      ++result.dropped;
      continue;
    }
    const auto bytes = static_cast<std::uint64_t>(encodedSize(m));
    const auto fits = [&](int receiver) {
      return static_cast<double>(usage.used(sender, receiver) + bytes) <= net.pair_budget_bytes;
    };

    if (m.header.receiver == kBroadcast) {
      bool any_in_range = false;
      bool any_delivered = false;
      for (int r = 0; r < n; ++r) {
        if (r == sender || !inRange(true_poses[sender], true_poses[r], net.max_comm_range)) continue;
        any_in_range = true;
        if (fits(r)) {
          usage.add(sender, r, bytes);
          result.delivered.push_back({r, m, env.sent_step});
          any_delivered = true;
        } else {
          Envelope copy = env;
          copy.message.header.receiver = static_cast<std::uint32_t>(r);
          result.deferred.push_back(std::move(copy));
        }
      }
      if (any_delivered) ledger.record(step, m);
      if (!any_in_range) ++result.dropped;
      continue;
    }

    const int receiver = static_cast<int>(m.header.receiver);
    if (receiver < 0 || receiver >= n) throw std::out_of_range("deliver: unknown receiver");
    if (!inRange(true_poses[sender], true_poses[receiver], net.max_comm_range)) {
      ++result.dropped;
      continue;
    }
    if (!fits(receiver)) {
      result.deferred.push_back(env);
      continue;
    }
    usage.add(sender, receiver, bytes);
    ledger.record(step, m);
    result.delivered.push_back({receiver, m, env.sent_step});
  }
  return result;
}

std::vector<PlannedMessage> handshakeRound(const Message& descriptor_request, const Message& confidence_map,
                                           std::span<const NeighborExchange> neighbors) {
  std::vector<PlannedMessage> plan;
  plan.push_back({1, descriptor_request});
  plan.push_back({1, confidence_map});
  for (const auto& n : neighbors) {
    if (n.descriptor_reply) plan.push_back({2, *n.descriptor_reply});
    if (n.confidence_map_reply) plan.push_back({2, *n.confidence_map_reply});
  }
  for (const auto& n : neighbors) {
    if (!n.slam_selected) continue;
    for (const auto& m : n.slam_messages) plan.push_back({3, m});
  }
  for (const auto& n : neighbors) {
    if (n.perception_selected && n.selected_detections) plan.push_back({3, *n.selected_detections});
  }
  return plan;
}

}  // namespace cslammot::comms
