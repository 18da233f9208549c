#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctsp/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctsp;

TEST_CASE("time mixtures keep their weights and bounds") {
  std::mt19937_64 rng(1);
  for (const TimeMixture& mix : {default_arrivals(), default_departures()}) {
    const int draws = 100000;
    std::vector<int> hits(mix.size(), 0);
    double total_weight = 0;
    for (const auto& c : mix) total_weight += c.weight;
    for (int i = 0; i < draws; ++i) {
      const auto [t, comp] = sample_time(mix, rng);
      REQUIRE(comp >= 0);
      ++hits[comp];
      CHECK(t >= mix[comp].low);
      CHECK(t <= mix[comp].high);
    }
    for (std::size_t k = 0; k < mix.size(); ++k)
      CHECK(std::abs(hits[k] / static_cast<double>(draws) - mix[k].weight / total_weight) <= 0.01);
  }
}

TEST_CASE("populations are deterministic and well formed") {
  PopulationSpec spec;
  spec.count = 40;
  spec.seed = 7;
  spec.workplaces = {{1000, 1000}, {6000, 2000}};
  const Population a = generate_population(spec);
  const Population b = generate_population(spec);
  REQUIRE(a.commuters.size() == 40);
  CHECK(a.locations.size() == 42);
  for (std::size_t i = 0; i < a.commuters.size(); ++i) {
    const Commuter& c = a.commuters[i];
    CHECK(c.inbound.desired_arrival < c.outbound.desired_departure);
    CHECK(c.inbound.desired_arrival >= 0);
    CHECK(c.outbound.desired_departure <= 86400);
    CHECK(c.home.x >= 0);
    CHECK(c.home.x <= spec.extent_m);
    CHECK(c.inbound.desired_arrival == b.commuters[i].inbound.desired_arrival);
    CHECK(c.home.y == b.commuters[i].home.y);
  }
  spec.count = 0;
  CHECK(generate_population(spec).commuters.empty());
  spec.count = 3;
  const Json j = population_spec_to_json(spec);
  const PopulationSpec back = population_spec_from_json(Json::parse(j.dump()));
  CHECK(back.count == 3);
  CHECK(back.workplaces.size() == 2);
  CHECK(back.arrivals.size() == spec.arrivals.size());
  CHECK(back.seed == 7);
}

TEST_CASE("brute force on tiny instances") {
  const Instance one = fixtures::random_instance(5, {.n = 1});
  const BruteForceResult b = brute_force_plan(one);
  REQUIRE(b.found);
  CHECK(b.vehicles == 2);
  CHECK(b.distance == 2 * one.travel().dist(one.commuters()[0].inbound.origin,
                                            one.commuters()[0].inbound.destination));

  // Neighbours with identical schedules share one car each way.
  std::vector<Point> pts{{0, 0}, {40, 0}, {6000, 0}};
  auto travel = std::make_shared<const TravelData>(TravelModel{}.build(pts));
  std::vector<Commuter> cs{make_commuter(0, 0, 2, *travel, 30000, 60000, pts[0]),
                           make_commuter(1, 1, 2, *travel, 30000, 60000, pts[1])};
  const Instance pair = build_instance(cs, travel, Parameters{});
  const BruteForceResult p = brute_force_plan(pair);
  CHECK(p.vehicles == 2);
  CHECK(solve_rea(pair).result.plan.vehicle_count == 2);
  CHECK_THROWS_AS(brute_force_plan(fixtures::random_instance(1, {.n = 8})), Error);
}

TEST_CASE("plan validation finds broken plans") {
  const Instance inst = fixtures::random_instance(3, {.n = 5, .side_m = 2500});
  const Plan good = solve_rea(inst).result.plan;
  REQUIRE(validate_plan(inst, good).empty());

  Plan missing = good;
  missing.routes.pop_back();
  CHECK_FALSE(validate_plan(inst, missing).empty());

  Plan twice = good;
  twice.routes.push_back(good.routes.front());
  CHECK_FALSE(validate_plan(inst, twice).empty());

  Plan wrong_distance = good;
  wrong_distance.total_distance += 1;
  CHECK_FALSE(validate_plan(inst, wrong_distance).empty());

  // Replace an outbound route by single trips driven by its riders.
  Plan split = good;
  for (std::size_t k = 0; k < split.routes.size(); ++k) {
    const Route r = split.routes[k];
    if (r.direction != Direction::Outbound || r.riders.size() < 2) continue;
    split.routes.erase(split.routes.begin() + static_cast<long>(k));
    const int n = inst.n();
    for (int c : r.riders)
      split.routes.push_back(make_route(inst.network(Direction::Outbound), {c, n + c}));
    split = make_plan(inst, split.routes, 0, 0);
    CHECK_FALSE(validate_plan(inst, split).empty());
    break;
  }
}

TEST_CASE("no sharing at capacity one") {
  Parameters p;
  p.capacity = 1;
  fixtures::RandomSpec spec;
  spec.n = 6;
  spec.params = p;
  const Instance inst = fixtures::random_instance(4, spec);
  const Plan plan = solve_rea(inst).result.plan;
  CHECK(plan.vehicle_count == 2 * inst.n());
  CHECK(average_ride(inst, plan) == doctest::Approx(average_direct_ride(inst)));
}

TEST_CASE("cross validation agrees on small instances") {
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const Instance inst = fixtures::random_instance(seed, {.n = 5, .side_m = 3000});
    const CrossReport r = cross_validate(inst);
    CHECK(r.agree);
    CHECK(r.brute_checked);
    CHECK(r.problems.empty());
  }
}

TEST_CASE("experiment grid writes its tables") {
  PopulationSpec spec;
  spec.count = 8;
  spec.extent_m = 4000;
  spec.workplaces = {{2000, 2000}};
  spec.seed = 3;
  const Instance pop = population_instance(generate_population(spec), Parameters{});
  ExperimentConfig cfg = experiment_config_from_json(Json::parse(R"({
      "algorithms": ["rea", "bpa"], "capacities": [1, 3], "cluster_sizes": [0, 4],
      "restarts": 3, "workers": 2})"));
  const ExperimentResult res = run_experiment(cfg, pop);
  CHECK(res.cells.size() == 8);
  for (const RunRecord& r : res.runs) CHECK(r.error.empty());
  for (const CellSummary& c : res.cells) {
    CHECK(c.commuters == 8);
    CHECK(c.failures == 0);
    if (c.capacity == 1) CHECK(c.vehicle_pct == doctest::Approx(100.0));
    CHECK(c.vehicle_pct <= 100.0 + 1e-9);
  }
  const auto dir = std::filesystem::temp_directory_path() / "ctsp_grid_test";
  std::filesystem::remove_all(dir);
  write_experiment(res, dir.string());
  for (const char* f : {"runs.csv", "cells.csv", "by_capacity.csv", "by_cluster_size.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK_FALSE(std::filesystem::exists(dir / "by_delta.csv"));
  std::ifstream runs(dir / "runs.csv");
  std::string header;
  std::getline(runs, header);
  CHECK(header == kRunRecordHeader);
  std::filesystem::remove_all(dir);
}
