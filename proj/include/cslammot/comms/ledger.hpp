#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cslammot/comms/messages.hpp"

namespace cslammot::comms {

/// log2 of a byte count; zero bytes report 0 with `no_communication` set.
struct CommVol {
  double value = 0.0;
  bool no_communication = false;
};
CommVol commVol(std::uint64_t total_bytes);

struct LedgerEntry {
  int step = 0;
  int sender = 0;
  std::uint32_t receiver = kBroadcast;
  MessageKind kind = MessageKind::kDescriptorRequest;
  std::uint64_t bytes = 0;
  Channel channel = Channel::kSlam;
};

/// Append-only record of delivered messages with running per-channel totals.
class CommLedger {
 public:
  void record(int step, const Message& m);
  void record(const LedgerEntry& entry);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  std::uint64_t total(Channel channel) const { return channel == Channel::kSlam ? slam_total_ : perception_total_; }
  std::uint64_t total() const { return slam_total_ + perception_total_; }
  std::uint64_t bytesAt(int step, Channel channel) const;
  std::uint64_t bytesFrom(int sender, Channel channel) const;
  std::uint64_t bytesTo(int receiver, Channel channel) const;

  /// Columns: step,sender,receiver,kind,bytes,channel. Broadcast receivers print as "all".
  void writeCsv(std::ostream& out) const;

 private:
  std::vector<LedgerEntry> entries_;
  std::uint64_t slam_total_ = 0;
  std::uint64_t perception_total_ = 0;
};

}  // namespace cslammot::comms
