#include <doctest.h>

#include "gapflow/sim/lane_change.hpp"
#include "gapflow/sim/lane_index.hpp"
#include "gapflow/sim/world.hpp"

using namespace gapflow::sim;

namespace {

WorldState empty_world() {
  SimConfig c;
  c.flow.mainline_rate = 0;
  c.flow.ramp_rate = 0;
  return make_world(c);
}

VehicleId put(WorldState& w, int lane, double x, double v, VehicleKind kind = VehicleKind::free,
              double assertiveness = 1.0) {
  Vehicle veh;
  veh.lane = lane;
  veh.position = x;
  veh.speed = v;
  veh.length = 4.5;
  veh.kind = kind;
  veh.assertiveness = assertiveness;
  return add_vehicle(w, veh);
}

LaneChangeEvaluation eval(const WorldState& w, VehicleId id, int target) {
  const LaneIndex index(w.vehicles, w.config.road.lane_count());
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    if (w.vehicles[i].id == id) return evaluate_lane_change(w, index, i, target);
  }
  FAIL("vehicle not found");
  return {};
}

}  // namespace

TEST_CASE("empty target lane accepts a mandatory merge") {
  auto w = empty_world();
  const auto id = put(w, 3, 500.0, 20.0, VehicleKind::merging);
  CHECK(lane_change_decision(id, w, Direction::left));
}

TEST_CASE("required gaps follow s0 + v T divided by assertiveness") {
  auto w = empty_world();
  const auto ego = put(w, 3, 500.0, 10.0, VehicleKind::merging);
  put(w, 2, 530.0, 15.0);  // leader ahead in the target lane
  put(w, 2, 470.0, 20.0);  // follower behind
  const auto e = eval(w, ego, 2);
  CHECK(e.required_front == doctest::Approx(2.0 + 10.0));
  CHECK(e.required_rear == doctest::Approx(2.0 + 20.0));
  CHECK(e.front_gap == doctest::Approx(530.0 - 4.5 - 500.0));
  CHECK(e.rear_gap == doctest::Approx(500.0 - 4.5 - 470.0));
  CHECK(e.safe);
  CHECK(e.accept());

  SUBCASE("assertiveness divides both requirements") {
    auto w2 = empty_world();
    const auto bold = put(w2, 3, 500.0, 10.0, VehicleKind::merging, 1.4);
    put(w2, 2, 530.0, 15.0);
    put(w2, 2, 470.0, 20.0);
    const auto e2 = eval(w2, bold, 2);
    CHECK(e2.required_front == doctest::Approx(12.0 / 1.4));
    CHECK(e2.required_rear == doctest::Approx(22.0 / 1.4));
  }
}

TEST_CASE("gap acceptance boundary") {
  // Follower at 20 m/s needs 22 m behind the changer's rear.
  for (const double rear_gap : {21.9, 22.0, 22.1}) {
    auto w = empty_world();
    const auto ego = put(w, 3, 500.0, 0.0, VehicleKind::merging);
    put(w, 2, 500.0 - 4.5 - rear_gap, 20.0);
    const auto e = eval(w, ego, 2);
    CHECK(e.safe == (rear_gap >= 22.0));
  }
}

TEST_CASE("higher assertiveness accepts a gap that a timid driver refuses") {
  auto timid = empty_world();
  const auto a = put(timid, 3, 500.0, 15.0, VehicleKind::merging, 0.25);
  put(timid, 2, 540.0, 15.0);
  put(timid, 2, 470.0, 15.0);
  auto bold = empty_world();
  const auto b = put(bold, 3, 500.0, 15.0, VehicleKind::merging, 1.4);
  put(bold, 2, 540.0, 15.0);
  put(bold, 2, 470.0, 15.0);
  CHECK_FALSE(eval(timid, a, 2).safe);
  CHECK(eval(bold, b, 2).safe);
}

TEST_CASE("mobil incentive") {
  SUBCASE("stuck behind a slow vehicle with a free lane alongside") {
    auto w = empty_world();
    const auto ego = put(w, 1, 300.0, 25.0);
    put(w, 1, 330.0, 10.0);
    CHECK(lane_change_decision(ego, w, Direction::left));
  }
  SUBCASE("no advantage on an empty road") {
    auto w = empty_world();
    const auto ego = put(w, 1, 300.0, 25.0);
    const auto e = eval(w, ego, 0);
    CHECK(e.gain == doctest::Approx(0.0));
    CHECK_FALSE(e.incentive);
  }
  SUBCASE("changing lanes in front of a fast follower is not worth it") {
    auto w = empty_world();
    const auto ego = put(w, 1, 300.0, 25.0);
    put(w, 1, 380.0, 24.0);
    put(w, 0, 270.0, 30.0);
    CHECK_FALSE(eval(w, ego, 0).accept());
  }
}

TEST_CASE("illegal moves are rejected") {
  auto w = empty_world();
  const auto id = put(w, 0, 100.0, 20.0);
  CHECK_THROWS_AS(lane_change_decision(id, w, Direction::left), std::invalid_argument);
  CHECK_THROWS_AS(lane_change_decision(9999, w, Direction::right), std::invalid_argument);
}
