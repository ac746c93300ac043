#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cslammot/perception/box.hpp"
#include "cslammot/perception/fusion.hpp"
#include "cslammot/perception/grid.hpp"
#include "cslammot/perception/selection.hpp"
#include "support/oracles.hpp"

using namespace cslammot;
using namespace cslammot::perception;

namespace {

GridSpec grid4() { return GridSpec::centered(4, 4, 1.0); }

BinaryMask maskFrom(std::initializer_list<int> cells) {
  BinaryMask m(grid4());
  for (int c : cells) m.bits[static_cast<std::size_t>(c)] = 1;
  return m;
}

sim::Detection det(double x, double y, double yaw, double conf) {
  sim::Detection d;
  d.pose_in_vehicle = Pose2(x, y, yaw);
  d.confidence = conf;
  return d;
}

}  // namespace

TEST_CASE("polygon area and clipping") {
  const Polygon square = {{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};
  CHECK(polygonArea(square) == doctest::Approx(4.0));
  const Polygon shifted = {{1.0, 1.0}, {3.0, 1.0}, {3.0, 3.0}, {1.0, 3.0}};
  CHECK(polygonArea(clipConvex(shifted, square)) == doctest::Approx(1.0));
  const Polygon far = {{5.0, 5.0}, {6.0, 5.0}, {6.0, 6.0}};
  CHECK(polygonArea(clipConvex(far, square)) == doctest::Approx(0.0));
}

TEST_CASE("oriented IoU on hand-computed overlaps") {
  const OrientedBox a{Pose2(0.0, 0.0, 0.0), 2.0, 2.0};
  CHECK(orientedIou(a, a) == doctest::Approx(1.0));
  CHECK(orientedIou(a, {Pose2(1.0, 0.0, 0.0), 2.0, 2.0}) == doctest::Approx(1.0 / 3.0));
  CHECK(orientedIou(a, {Pose2(5.0, 0.0, 0.0), 2.0, 2.0}) == doctest::Approx(0.0));
  // Square rotated 45 degrees inside a larger square: intersection is the smaller one.
  const OrientedBox big{Pose2(0.0, 0.0, 0.0), 4.0, 4.0};
  const OrientedBox diamond{Pose2(0.0, 0.0, std::numbers::pi / 4.0), 2.0, 2.0};
  CHECK(orientedIou(big, diamond) == doctest::Approx(4.0 / 16.0));
  // Yaw by pi is the same box.
  CHECK(orientedIou({Pose2(1.0, 2.0, 0.3), 4.5, 1.8}, {Pose2(1.0, 2.0, 0.3 + std::numbers::pi), 4.5, 1.8}) ==
        doctest::Approx(1.0));
}

TEST_CASE("decideVehicle uses hand-counted mask IoU") {
  // Ego cells {0,1,2,3}, neighbor {2,3,4,5}: intersection 2, union 6.
  const auto ego = maskFrom({0, 1, 2, 3});
  const auto neighbor = maskFrom({2, 3, 4, 5});
  CHECK(ego.count() == 4);
  const auto d = decideVehicle(ego, neighbor, 0.5);
  CHECK(d.iou == doctest::Approx(1.0 / 3.0));
  CHECK(d.selected);
  CHECK_FALSE(decideVehicle(ego, neighbor, 0.3).selected);
  // Identical masks never select: IoU 1 and nothing new.
  CHECK_FALSE(decideVehicle(ego, ego, 1.0).selected);
  // A neighbor covering only ego cells adds nothing.
  CHECK_FALSE(decideVehicle(ego, maskFrom({1}), 1.0).selected);
  BinaryMask other(GridSpec::centered(2, 2, 1.0));
  CHECK_THROWS_AS(decideVehicle(ego, other, 0.5), std::invalid_argument);
}

TEST_CASE("dynamic mask and request map") {
  ConfidenceMap c(grid4(), 0, 0, 0.0);
  c.values[3] = 0.5;
  c.values[7] = 0.2;
  const auto m = dynamicMask(c, 0.5);
  CHECK(m.count() == 1);
  CHECK(m.bits[3] == 1);
  const auto r = requestMap(c);
  CHECK(r.values[3] == doctest::Approx(0.5));
  CHECK(r.values[0] == doctest::Approx(1.0));
}

TEST_CASE("selectAreas respects threshold, budget and tie order") {
  ConfidenceMap neighbor(grid4(), 1, 0, 0.0);
  ConfidenceMap request(grid4(), 0, 0, 1.0);
  neighbor.values[9] = 0.9;
  neighbor.values[2] = 0.6;
  neighbor.values[5] = 0.6;
  neighbor.values[14] = 0.6;
  neighbor.values[11] = 0.1;
  request.values[14] = 0.5;  // score 0.3

  const auto all = selectAreas(neighbor, request, 0.2, 16);
  CHECK(all.count() == 4);
  CHECK(all.bits[11] == 0);

  const auto strict = selectAreas(neighbor, request, 0.5, 16);
  CHECK(strict.count() == 3);
  CHECK(strict.bits[14] == 0);

  // Budget 2: the 0.9 cell, then the lowest-index cell of the 0.6 tie.
  const auto capped = selectAreas(neighbor, request, 0.2, 2);
  CHECK(capped.count() == 2);
  CHECK(capped.bits[9] == 1);
  CHECK(capped.bits[2] == 1);
  CHECK(capped.bits[5] == 0);
  CHECK(selectAreas(neighbor, request, 0.2, 2).bits == capped.bits);
  CHECK(selectAreas(neighbor, request, 0.2, 0).count() == 0);
}

TEST_CASE("grid cell lookup and warping") {
  const auto g = GridSpec::centered(4, 4, 1.0);
  CHECK(g.cellIndexOf({-1.5, -1.5}) == 0);
  CHECK(g.cellIndexOf({1.5, 1.5}) == 15);
  CHECK_FALSE(g.cellIndexOf({2.5, 0.0}).has_value());
  const Eigen::Vector2d c = g.cellCenter(0, 3);
  CHECK(c.x() == doctest::Approx(1.5));
  CHECK(c.y() == doctest::Approx(-1.5));

  ConfidenceMap m(g, 1, 0, 0.0);
  m.values[5] = 0.7;
  const auto same = warpMap(m, Pose2(), g);
  CHECK(same.values == m.values);
  const auto moved = warpMap(m, Pose2(1.0, 0.0, 0.0), g);
  CHECK(moved.values[6] == doctest::Approx(0.7));
}

TEST_CASE("packing keeps masked detections and warps them to the ego frame") {
  const GridSpec g = GridSpec::centered(20, 20, 1.0);
  const Pose2 neighbor_in_ego(2.0, 1.0, std::numbers::pi / 2.0);
  std::vector<sim::Detection> dets = {det(3.0, 0.0, 0.0, 0.9), det(-4.0, 2.0, 0.5, 0.8)};
  dets[0].truth_id = 4;
  BinaryMask mask(g);
  const auto cell = g.cellIndexOf(compose(neighbor_in_ego, dets[0].pose_in_vehicle).translation());
  REQUIRE(cell.has_value());
  mask.bits[static_cast<std::size_t>(*cell)] = 1;
  const auto payload = packSelected(dets, mask, neighbor_in_ego, 1, 7);
  REQUIRE(payload.entries.size() == 1);
  CHECK(payload.entries[0].cell == static_cast<std::uint32_t>(*cell));
  CHECK(payload.sender == 1);
  CHECK(payload.stamp == 7);
  const auto back = warpToEgo(payload, neighbor_in_ego);
  REQUIRE(back.size() == 1);
  CHECK(approxEqual(back[0].pose_in_vehicle, compose(neighbor_in_ego, dets[0].pose_in_vehicle), 1e-12));
  CHECK(back[0].confidence == 0.9);
  CHECK(back[0].truth_id == 4);

  const auto dense = packDense(dets, g, neighbor_in_ego, 1, 7);
  CHECK(dense.entryCount() == static_cast<std::size_t>(g.cellCount()));
  CHECK(dense.entries.size() == 2);
}

TEST_CASE("fusion merges overlapping boxes and keeps separate ones") {
  const std::vector<sim::Detection> ego = {det(10.0, 0.0, 0.0, 0.6), det(30.0, 5.0, 0.0, 0.7)};
  const std::vector<std::vector<sim::Detection>> received = {{det(10.4, 0.2, 0.0, 0.5)}, {det(-20.0, 0.0, 0.0, 0.9)}};
  const auto fused = fuseDetections(ego, received);
  REQUIRE(fused.size() == 3);
  const auto merged = std::find_if(fused.begin(), fused.end(), [](const auto& d) { return std::abs(d.pose_in_vehicle.x() - 10.0) < 1.0; });
  REQUIRE(merged != fused.end());
  CHECK(merged->confidence == doctest::Approx(1.0 - 0.4 * 0.5));
  CHECK(merged->pose_in_vehicle.x() == doctest::Approx((0.6 * 10.0 + 0.5 * 10.4) / 1.1));
  // Order does not change the result.
  const std::vector<std::vector<sim::Detection>> reversed = {received[1], received[0]};
  CHECK(fuseDetections(ego, reversed).size() == 3);
  CHECK(fuseDetections({}, {}).empty());
}
