#include <cmath>
#include <random>
#include <sstream>

#include "ctsp/io.hpp"
#include "ctsp/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctsp;

namespace {

std::shared_ptr<const TravelData> line_travel(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x, 0.0});
  return std::make_shared<const TravelData>(TravelModel{}.build(pts));
}

}  // namespace

TEST_CASE("windows around the desired times") {
  auto travel = line_travel({0.0, 12000.0});
  REQUIRE(travel->tau(0, 1) == 1200);
  const Commuter c = make_commuter(0, 0, 1, *travel, 28800, 61200, {0, 0});
  const CommuterWindows w = derive_time_windows(c, 600, 0.5, *travel);
  CHECK(w.inbound_destination.window_start == 28200);
  CHECK(w.inbound_destination.window_end == 29400);
  CHECK(w.inbound_origin.ride_limit == 1800);
  CHECK(w.inbound_origin.window_start == 26400);
  CHECK(w.inbound_origin.window_end == 28200);
  CHECK(w.outbound_origin.window_start == 60600);
  CHECK(w.outbound_origin.window_end == 61800);
  CHECK(w.outbound_destination.window_start == 60600 + 1200);
  CHECK(w.outbound_destination.window_end == 61800 + 1800);
  CHECK(w.inbound_origin.demand == 1);
  CHECK(w.inbound_destination.demand == 0);
}

TEST_CASE("no slack collapses every window") {
  auto travel = line_travel({0.0, 0.0});
  const Commuter c = make_commuter(0, 0, 1, *travel, 30000, 60000, {0, 0});
  const CommuterWindows w = derive_time_windows(c, 0, 0, *travel);
  for (const Location* l : {&w.inbound_origin, &w.inbound_destination})
    CHECK(l->window_start == l->window_end);
  CHECK(w.inbound_destination.window_start == 30000);
  CHECK(w.inbound_origin.window_start == 30000);
  CHECK(w.outbound_origin.window_start == 60000);
  CHECK(w.outbound_destination.window_end == 60000);
}

TEST_CASE("windows match a direct re-evaluation of the formulas") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0, 10000);
  for (int trial = 0; trial < 200; ++trial) {
    auto travel = std::make_shared<const TravelData>(
        TravelModel{}.build({{coord(rng), coord(rng)}, {coord(rng), coord(rng)}}));
    const double at = 25000 + static_cast<double>(rng() % 10000);
    const double dt = 55000 + static_cast<double>(rng() % 10000);
    const double delta = static_cast<double>(rng() % 1200);
    const double R = (rng() % 100) / 100.0;
    const double s = static_cast<double>(rng() % 3) * 30;
    const Commuter c = make_commuter(0, 0, 1, *travel, at, dt, {0, 0});
    const CommuterWindows w = derive_time_windows(c, delta, R, *travel, s);
    const double tau = travel->tau(0, 1);
    const double L = (1 + R) * tau;
    const double a_d = at - delta, b_d = at + delta;
    CHECK(w.inbound_destination.window_start == doctest::Approx(a_d));
    CHECK(w.inbound_destination.window_end == doctest::Approx(b_d));
    CHECK(w.inbound_origin.window_start == doctest::Approx(a_d - s - L));
    CHECK(w.inbound_origin.window_end == doctest::Approx(b_d - s - tau));
    CHECK(w.inbound_origin.ride_limit == doctest::Approx(L));
    const double a_o = dt - delta, b_o = dt + delta;
    CHECK(w.outbound_origin.window_start == doctest::Approx(a_o));
    CHECK(w.outbound_origin.window_end == doctest::Approx(b_o));
    CHECK(w.outbound_destination.window_start == doctest::Approx(a_o + s + tau));
    CHECK(w.outbound_destination.window_end == doctest::Approx(b_o + s + L));
    CHECK(w.outbound_origin.ride_limit == doctest::Approx(L));
  }
}

TEST_CASE("euclidean travel data on a line") {
  Parameters p;
  auto travel = line_travel({0.0, 100.0, 200.4, 1000.0});
  std::vector<Commuter> cs;
  for (int i = 0; i < 3; ++i) cs.push_back(make_commuter(i, i, 3, *travel, 30000, 60000, travel->points[i]));
  const Instance inst = build_instance(cs, travel, p);
  CHECK(inst.travel().dist(0, 1) == 100);
  CHECK(inst.travel().dist(0, 2) == 200);
  CHECK(inst.travel().dist(1, 3) == 900);
  CHECK(inst.travel().dist(2, 3) == 800);
  CHECK(inst.travel().tau(2, 3) == 80);
  CHECK(inst.params().fixed_cost_multiplier == 1000);
  CHECK(inst.network(Direction::Inbound).size() == 6);
  CHECK(inst.network(Direction::Outbound).node(0).id == 3);  // outbound origin is the workplace
}

TEST_CASE("single commuter instance") {
  auto travel = line_travel({0.0, 5000.0});
  const Instance inst = build_instance({make_commuter(0, 0, 1, *travel, 30000, 60000, {0, 0})},
                                       travel, Parameters{});
  CHECK(inst.n() == 1);
  CHECK(inst.travel().tau.rows() == 2);
  CHECK(inst.network(Direction::Inbound).size() == 2);
}

TEST_CASE("instances reject inconsistent travel data") {
  TravelData t = TravelModel{}.build({{0, 0}, {1000, 0}, {2000, 0}});
  t.dist(0, 2) = 5000;  // longer than going through location 1
  auto travel = std::make_shared<const TravelData>(t);
  std::vector<Commuter> cs{make_commuter(0, 0, 2, *travel, 30000, 60000, {0, 0})};
  CHECK_THROWS_AS(build_instance(cs, travel, Parameters{}), Error);
  Parameters bad;
  bad.capacity = 0;
  CHECK_THROWS_AS(build_instance(cs, line_travel({0, 1000, 2000}), bad), Error);
  CHECK_THROWS_AS(build_instance({}, line_travel({0, 1}), Parameters{}), Error);
}

TEST_CASE("triangle inequality holds after closure") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(0, 5000);
  std::vector<Point> pts;
  for (int i = 0; i < 120; ++i) pts.push_back({coord(rng), coord(rng)});
  const TravelData t = TravelModel{}.build(pts);
  const std::size_t L = pts.size();
  long violations = 0;
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j)
      for (std::size_t k = 0; k < L; ++k) {
        violations += t.tau(i, k) > t.tau(i, j) + t.tau(j, k);
        violations += t.dist(i, k) > t.dist(i, j) + t.dist(j, k);
      }
  CHECK(violations == 0);
}

TEST_CASE("subinstances renumber commuters") {
  const Instance inst = fixtures::random_instance(4);
  const Instance sub = subinstance(inst, {4, 1});
  REQUIRE(sub.n() == 2);
  CHECK(sub.commuters()[0].id == 0);
  CHECK(sub.commuters()[0].inbound.origin == inst.commuters()[4].inbound.origin);
  CHECK(sub.network(Direction::Inbound).node(0).window_start ==
        inst.network(Direction::Inbound).node(4).window_start);
  CHECK(sub.network(Direction::Outbound).node(3).window_end ==
        inst.network(Direction::Outbound).node(inst.n() + 1).window_end);
  CHECK_THROWS_AS(subinstance(inst, {0, 99}), Error);

  Parameters p = inst.params();
  p.capacity = 2;
  p.delta_s = 900;
  const Instance wider = with_parameters(inst, p);
  CHECK(wider.capacity() == 2);
  CHECK(wider.network(Direction::Inbound).node(inst.n()).window_end ==
        inst.network(Direction::Inbound).node(inst.n()).window_end + 300);
}

TEST_CASE("instance JSON round trip") {
  Parameters p;
  p.capacity = 3;
  p.delta_s = 300;
  p.detour_ratio = 0.75;
  p.service_s = 30;
  fixtures::RandomSpec spec;
  spec.params = p;
  const Instance inst = fixtures::random_instance(9, spec);
  for (bool matrices : {true, false}) {
    const Json j = instance_to_json(inst, matrices);
    CHECK(j.contains("tau") == matrices);
    const Instance back = instance_from_json(Json::parse(j.dump()));
    REQUIRE(back.n() == inst.n());
    CHECK(back.capacity() == 3);
    CHECK(back.params().delta_s == 300);
    CHECK(back.params().detour_ratio == 0.75);
    CHECK(back.params().service_s == 30);
    for (Direction d : {Direction::Inbound, Direction::Outbound})
      for (int k = 0; k < 2 * inst.n(); ++k) {
        const Location& a = inst.network(d).node(k);
        const Location& b = back.network(d).node(k);
        CHECK(a.window_start == b.window_start);
        CHECK(a.window_end == b.window_end);
        CHECK(a.ride_limit == b.ride_limit);
        for (int l = 0; l < 2 * inst.n(); ++l) CHECK(inst.network(d).dist(k, l) == back.network(d).dist(k, l));
      }
  }
  Parameters other;
  other.capacity = 2;
  CHECK(instance_from_json(instance_to_json(inst), other).capacity() == 2);
  CHECK_THROWS(instance_from_json(Json::parse(R"({"capacity": 4})")));
}

TEST_CASE("plan JSON round trip") {
  const Instance inst = fixtures::random_instance(2);
  const int n = inst.n();
  std::vector<Route> routes;
  for (Direction d : {Direction::Inbound, Direction::Outbound})
    for (int i = 0; i < n; ++i) routes.push_back(make_route(inst.network(d), {i, n + i}));
  const Plan plan = make_plan(inst, routes, 0, 0);
  const Plan back = plan_from_json(Json::parse(plan_to_json(plan).dump()));
  REQUIRE(back.routes.size() == plan.routes.size());
  CHECK(back.vehicle_count == 2 * n);
  CHECK(back.total_distance == plan.total_distance);
  CHECK(back.routes[n].direction == Direction::Outbound);
  CHECK(back.routes[3].stops == plan.routes[3].stops);
  CHECK_THROWS_AS(plan_from_json(Json::parse(R"({"routes": [{"driver": 0}]})")), Error);
}
