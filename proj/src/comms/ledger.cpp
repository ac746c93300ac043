#include "cslammot/comms/ledger.hpp"

#include <cmath>
#include <ostream>

namespace cslammot::comms {

CommVol commVol(std::uint64_t total_bytes) {
  if (total_bytes == 0) return {0.0, true};
  return {std::log2(static_cast<double>(total_bytes)), false};
}

void CommLedger::record(int step, const Message& m) {
  LedgerEntry e;
  e.step = step;
  e.sender = static_cast<int>(m.header.sender);
  e.receiver = m.header.receiver;
  e.kind = m.kind();
  e.bytes = encodedSize(m);
  e.channel = channelOf(m.kind());
  record(e);
}

void CommLedger::record(const LedgerEntry& entry) {
  entries_.push_back(entry);
  (entry.channel == Channel::kSlam ? slam_total_ : perception_total_) += entry.bytes;
}

std::uint64_t CommLedger::bytesAt(int step, Channel channel) const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) {
    if (e.step == step && e.channel == channel) sum += e.bytes;
  }
  return sum;
}

std::uint64_t CommLedger::bytesFrom(int sender, Channel channel) const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) {
    if (e.sender == sender && e.channel == channel) sum += e.bytes;
  }
  return sum;
}

std::uint64_t CommLedger::bytesTo(int receiver, Channel channel) const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) {
    if (e.receiver == static_cast<std::uint32_t>(receiver) && e.channel == channel) sum += e.bytes;
  }
  return sum;
}

void CommLedger::writeCsv(std::ostream& out) const {
  out << "step,sender,receiver,kind,bytes,channel\n";
  for (const auto& e : entries_) {
    out << e.step << ',' << e.sender << ',';
    if (e.receiver == kBroadcast) {
      out << "all";
    } else {
      out << e.receiver;
    }
    out << ',' << toString(e.kind) << ',' << e.bytes << ',' << toString(e.channel) << '\n';
  }
}

}  // namespace cslammot::comms
