#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cslammot/comms/ledger.hpp"
#include "cslammot/comms/messages.hpp"
#include "cslammot/comms/network.hpp"
#include "support/comms_cases.hpp"

using namespace cslammot;
using namespace cslammot::comms;

TEST_CASE("CommVol is log2 of the byte count") {
  CHECK(commVol(1ULL << 23).value == 23.0);
  CHECK(commVol(1ULL << 10).value == 10.0);
  CHECK(commVol(1).value == 0.0);
  CHECK_FALSE(commVol(1).no_communication);
  CHECK(commVol(0).no_communication);
  CHECK(commVol(0).value == 0.0);
  CHECK(commVol(3).value == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("encoded sizes match the schema for every message kind") {
  for (const auto& g : oracle::goldenMessages()) {
    CAPTURE(g.label);
    CHECK(encodedSize(g.message) == g.bytes);
    CHECK(encode(g.message).size() == g.bytes);
  }
  CHECK(kHeaderBytes == 16);
}

TEST_CASE("header is little-endian in the documented field order") {
  const auto m = makePoseUpdateMessage(0x01020304, 7, 0x0a0b, Pose2(), Eigen::Matrix3d::Identity());
  const auto bytes = encode(m);
  CHECK(bytes[0] == 0x04);
  CHECK(bytes[3] == 0x01);
  CHECK(bytes[4] == 7);
  CHECK(bytes[8] == 0x0b);
  CHECK(bytes[9] == 0x0a);
  CHECK(bytes[12] == 5);
  CHECK(bytes[13] == 0);
  CHECK(bytes[14] == 1);
}

TEST_CASE("messages decode to what was encoded") {
  for (const auto& g : oracle::goldenMessages()) {
    CAPTURE(g.label);
    const auto back = decode(encode(g.message));
    CHECK((back.kind() == g.message.kind()));
    CHECK(back.header.sender == g.message.header.sender);
    CHECK(back.header.receiver == g.message.header.receiver);
    CHECK(back.header.step == g.message.header.step);
    CHECK(encode(back) == encode(g.message));
  }
  const auto pose = makePoseUpdateMessage(1, 0, 3, Pose2(1.0, 2.0, 0.3), Eigen::Vector3d(0.5, 0.25, 0.125).asDiagonal());
  const auto p = decode(encode(pose));
  CHECK(approxEqual(poseOf(p), Pose2(1.0, 2.0, 0.3), 1e-6));
  CHECK(covarianceOf(p)(1, 1) == doctest::Approx(0.25));
  CHECK(covarianceOf(p)(0, 1) == 0.0);

  const auto grid = perception::GridSpec::centered(4, 4, 1.0);
  perception::ConfidenceMap map(grid, 2, 1, 0.0);
  map.values[5] = 1.0;
  map.values[6] = 0.5;
  const auto restored = confidenceMapOf(decode(encode(makeConfidenceMapMessage(2, 1, map))), grid);
  CHECK(restored.values[5] == 1.0);
  CHECK(restored.values[6] == doctest::Approx(0.5).epsilon(1.0 / 255.0));
  CHECK(restored.vehicle == 2);

  const auto kp = keypointsOf(decode(encode(makeLocalFeaturesMessage(1, 0, 3, oracle::syntheticKeypoints(4, 8)))));
  CHECK(kp.points.size() == 4);
  CHECK(kp.points[2].position.x() == doctest::Approx(1.0));
}

TEST_CASE("decode rejects malformed input") {
  const auto bytes = encode(makeDescriptorMessage(0, kBroadcast, 1, Eigen::VectorXd::Ones(8)));
  CHECK_THROWS_AS(decode(std::span<const std::uint8_t>(bytes.data(), 10)), std::invalid_argument);
  CHECK_THROWS_AS(decode(std::span<const std::uint8_t>(bytes.data(), bytes.size() - 1)), std::invalid_argument);
  auto bad = bytes;
  bad[12] = 9;
  CHECK_THROWS_AS(decode(bad), std::invalid_argument);
}

TEST_CASE("channels split SLAM and perception traffic") {
  CHECK((channelOf(MessageKind::kDescriptorRequest) == Channel::kSlam));
  CHECK((channelOf(MessageKind::kLocalFeatures) == Channel::kSlam));
  CHECK((channelOf(MessageKind::kPoseUpdate) == Channel::kSlam));
  CHECK((channelOf(MessageKind::kConfidenceMap) == Channel::kPerception));
  CHECK((channelOf(MessageKind::kSelectedDetections) == Channel::kPerception));
}

TEST_CASE("ledger totals and CSV") {
  CommLedger ledger;
  const auto golden = oracle::goldenMessages();
  for (const auto& g : golden) ledger.record(4, g.message);
  std::uint64_t slam = 0, perception = 0;
  for (const auto& g : golden) (channelOf(g.message.kind()) == Channel::kSlam ? slam : perception) += g.bytes;
  CHECK(ledger.total(Channel::kSlam) == slam);
  CHECK(ledger.total(Channel::kPerception) == perception);
  CHECK(ledger.total() == slam + perception);
  CHECK((ledger.bytesAt(4, Channel::kSlam) == slam));
  CHECK((ledger.bytesAt(5, Channel::kSlam) == 0));
  CHECK((ledger.bytesFrom(1, Channel::kSlam) == 284848 + 52));
  CHECK((ledger.bytesTo(0, Channel::kPerception) == 16 + 28 * 7));
  std::ostringstream csv;
  ledger.writeCsv(csv);
  const std::string text = csv.str();
  CHECK(text.rfind("step,sender,receiver,kind,bytes,channel", 0) == 0);
  CHECK(text.find(",all,") != std::string::npos);
}

TEST_CASE("delivery enforces range and per-pair budget") {
  const std::vector<Pose2> poses = {Pose2(0, 0, 0), Pose2(100, 0, 0), Pose2(500, 0, 0)};
  NetworkModel net;
  net.max_comm_range = 300.0;
  net.pair_budget_bytes = 400.0;
  PairUsage usage;
  CommLedger ledger;
  const auto desc = makeDescriptorMessage(0, kBroadcast, 0, Eigen::VectorXd::Ones(64));  // 272 bytes
  const auto pose_far = makePoseUpdateMessage(0, 2, 0, Pose2(), Eigen::Matrix3d::Identity());
  std::vector<Envelope> outbox = {{desc, 0}, {desc, 0}, {pose_far, 0}};
  const auto r = deliver(outbox, net, poses, 0, usage, ledger);
  // First broadcast reaches vehicle 1 only; the second exceeds the pair budget; vehicle 2 is out of range.
  CHECK(r.delivered.size() == 1);
  CHECK(r.delivered[0].receiver == 1);
  CHECK(r.deferred.size() == 1);
  CHECK(r.deferred[0].message.header.receiver == 1u);
  CHECK(r.dropped == 1);
  CHECK(ledger.total() == 272);

  usage.reset();
  const auto next = deliver(r.deferred, net, poses, 1, usage, ledger);
  CHECK(next.delivered.size() == 1);
  CHECK(next.delivered[0].sent_step == 0);
  CHECK(ledger.total() == 544);

  // Too old to deliver.
  usage.reset();
  const auto stale = deliver(r.deferred, net, poses, 2, usage, ledger);
  CHECK(stale.delivered.empty());
  CHECK(stale.dropped == 1);

  NetworkModel invalid;
  invalid.max_deferral_steps = -1;
  CHECK_THROWS(deliver(outbox, invalid, poses, 0, usage, ledger));
}

TEST_CASE("handshake phases and unselected neighbors") {
  const auto req = makeDescriptorMessage(0, kBroadcast, 1, Eigen::VectorXd::Ones(4));
  const auto grid = perception::GridSpec::centered(2, 2, 1.0);
  const auto map = makeConfidenceMapMessage(0, 1, perception::ConfidenceMap(grid, 0, 1));
  NeighborExchange selected;
  selected.neighbor = 1;
  selected.descriptor_reply = makeDescriptorMessage(1, 0, 1, Eigen::VectorXd::Ones(4));
  selected.slam_selected = true;
  selected.slam_messages = {makePoseUpdateMessage(1, 0, 1, Pose2(), Eigen::Matrix3d::Identity())};
  selected.perception_selected = true;
  selected.selected_detections = makeSelectedDetectionsMessage(1, 0, 1, {});
  NeighborExchange ignored = selected;
  ignored.neighbor = 2;
  ignored.slam_selected = false;
  ignored.perception_selected = false;
  const std::vector<NeighborExchange> neighbors = {selected, ignored};
  const auto plan = handshakeRound(req, map, neighbors);
  REQUIRE(plan.size() == 6);
  CHECK(plan[0].phase == 1);
  CHECK(plan[1].phase == 1);
  CHECK(plan[2].phase == 2);
  CHECK(plan[3].phase == 2);
  CHECK(plan[4].phase == 3);
  CHECK((plan[4].message.kind() == MessageKind::kPoseUpdate));
  CHECK((plan[5].message.kind() == MessageKind::kSelectedDetections));
  for (const auto& p : plan) {
    if (p.phase == 3) CHECK(p.message.header.sender == 1u);
  }
}
