#include <cmath>

#include "ctsp/bnp.hpp"
#include "ctsp/harness.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctsp;

namespace {

Instance dense(unsigned seed, int n, int capacity = 4) {
  fixtures::RandomSpec spec;
  spec.n = n;
  spec.side_m = 3000;
  spec.workplaces = 1;
  spec.arrival_spread_s = 600;
  spec.params.capacity = capacity;
  return fixtures::random_instance(seed, spec);
}

struct Fixture {
  Instance inst;
  RoutePool pool;
  Rmp rmp;
  explicit Fixture(Instance i)
      : inst(std::move(i)), pool(enumerate_routes(inst)), rmp(inst, {1, 0}, {1, 0}) {
    rmp.add_pool(pool);
  }
  // Column id of a shared route with the given driver and riders, or -1.
  int id(Direction dir, int driver, std::vector<int> riders) const {
    for (std::size_t k = 0; k < rmp.size(); ++k) {
      const Route& r = rmp.columns()[k].route;
      if (r.direction == dir && r.driver == driver && r.riders == riders) return static_cast<int>(k);
    }
    return -1;
  }
};

}  // namespace

TEST_CASE("fractional driver values give two complementary children") {
  Fixture f(dense(1, 4));
  int shared = -1;
  for (std::size_t k = 0; k < f.rmp.size() && shared < 0; ++k) {
    const Route& r = f.rmp.columns()[k].route;
    if (r.direction == Direction::Inbound && r.riders.size() >= 2) shared = static_cast<int>(k);
  }
  REQUIRE(shared >= 0);
  const Route& r = f.rmp.columns()[shared].route;
  const int rider = r.riders[0] == r.driver ? r.riders[1] : r.riders[0];
  const int single = f.id(Direction::Inbound, rider, {rider});
  REQUIRE(single >= 0);
  std::vector<double> x(f.rmp.size(), 0.0);
  x[single] = 0.5;
  x[shared] = 0.5;
  const auto v = driver_values(f.rmp, x);
  CHECK(v[rider] == 0.5);
  CHECK(v[r.driver] == 0.5);
  const int pick = std::min(rider, r.driver);  // ties go to the lower index
  const auto kids = branch(f.rmp, x, BranchNode{});
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].driver[pick] == 1);
  CHECK(kids[1].driver[pick] == 0);
  CHECK(kids[0].driver[std::max(rider, r.driver)] == -1);
  CHECK(kids[0].depth == 1);
  CHECK(kids[0].edges.empty());
}

TEST_CASE("fractional edge flows give two or four children") {
  Fixture f(dense(2, 4));
  const int n = 4;
  // Driver 0 takes commuter 1 along half the time, inbound and outbound.
  int in_shared = f.id(Direction::Inbound, 0, {0, 1});
  int out_shared = f.id(Direction::Outbound, 0, {0, 1});
  REQUIRE(in_shared >= 0);
  REQUIRE(out_shared >= 0);
  std::vector<double> x(f.rmp.size(), 0.0);
  x[in_shared] = 0.5;
  x[f.id(Direction::Inbound, 0, {0})] = 0.5;
  // Inbound only: V stays integral (driver 0 drives once in total).
  auto kids = branch(f.rmp, x, BranchNode{});
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].edges.size() == 1);
  CHECK(kids[0].edges[0].value == true);
  CHECK(kids[1].edges[0].value == false);
  CHECK(kids[0].edges[0].direction == Direction::Inbound);
  // Both directions: four children from 11 down to 00.
  x[out_shared] = 0.5;
  x[f.id(Direction::Outbound, 0, {0})] = 0.5;
  kids = branch(f.rmp, x, BranchNode{});
  REQUIRE(kids.size() == 4);
  const bool expect[4][2] = {{true, true}, {true, false}, {false, true}, {false, false}};
  for (int k = 0; k < 4; ++k) {
    REQUIRE(kids[k].edges.size() == 2);
    CHECK(kids[k].edges[0].direction == Direction::Inbound);
    CHECK(kids[k].edges[1].direction == Direction::Outbound);
    CHECK(kids[k].edges[0].value == expect[k][0]);
    CHECK(kids[k].edges[1].value == expect[k][1]);
  }
  // Integral solutions do not branch.
  std::vector<double> whole(f.rmp.size(), 0.0);
  for (Direction d : {Direction::Inbound, Direction::Outbound})
    for (int i = 0; i < n; ++i) whole[f.id(d, i, {i})] = 1.0;
  CHECK(branch(f.rmp, whole, BranchNode{}).empty());
}

TEST_CASE("fixings restrict drivers and columns") {
  const int n = 4;
  BranchNode node;
  node.driver = {-1, 0, -1, 1};
  node.edges.push_back({Direction::Inbound, 0, 2, true});      // 2 has a predecessor
  node.edges.push_back({Direction::Outbound, n + 3, n + 0, true});  // 3 has a successor
  const auto banned = banned_drivers(node, n);
  CHECK(banned == std::vector<char>{0, 1, 1, 1});

  Route r;
  r.direction = Direction::Inbound;
  r.driver = 0;
  r.stops = {0, 2, n + 2, n + 0};
  CHECK(column_allowed(r, node, banned));
  r.stops = {0, 1, 2, n + 1, n + 2, n + 0};  // 2 reached from 1
  CHECK_FALSE(column_allowed(r, node, banned));
  r.stops = {0, 1, n + 1, n + 0};  // leaves 0 for another node
  CHECK_FALSE(column_allowed(r, node, banned));
  r.direction = Direction::Outbound;
  CHECK_FALSE(column_allowed(r, node, banned));  // reaches n + 0 from n + 1
  r.stops = {0, 2, n + 2, n + 0};
  CHECK_FALSE(column_allowed(r, node, banned));
  r.stops = {0, n + 0};  // reaches n + 0 directly
  CHECK_FALSE(column_allowed(r, node, banned));
  r.stops = {0, 3, n + 3, n + 0};
  CHECK(column_allowed(r, node, banned));
  r.direction = Direction::Inbound;
  r.driver = 1;
  r.stops = {1, n + 1};
  CHECK_FALSE(column_allowed(r, node, banned));
  BranchNode zero;
  zero.edges.push_back({Direction::Inbound, 0, 2, false});
  r.driver = 0;
  r.stops = {0, 2, n + 2, n + 0};
  CHECK_FALSE(column_allowed(r, zero, banned_drivers(zero, n)));
  r.direction = Direction::Outbound;
  CHECK(column_allowed(r, zero, banned_drivers(zero, n)));
}

TEST_CASE("a single commuter drives alone both ways") {
  const Instance inst = fixtures::random_instance(4, {.n = 1});
  const SolveResult r = solve_bpa(inst);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.plan.vehicle_count == 2);
  const Meters direct = inst.network(Direction::Inbound).dist(0, 1) +
                        inst.network(Direction::Outbound).dist(0, 1);
  CHECK(r.plan.total_distance == direct);
  CHECK(r.stats.tree_nodes == 1);
  CHECK(r.gap == 0.0);
}

TEST_CASE("branch-and-price matches route enumeration") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const int n = 6 + static_cast<int>(seed % 4);
    const Instance inst = dense(seed, n, 2 + static_cast<int>(seed % 3));
    const ReaResult rea = solve_rea(inst);
    REQUIRE(rea.result.status == SolveStatus::Optimal);
    for (bool cuts : {true, false}) {
      BpaOptions opt;
      opt.use_cuts = cuts;
      opt.threads = 2;
      const SolveResult bpa = solve_bpa(inst, opt);
      INFO("seed " << seed << " cuts " << cuts);
      REQUIRE(bpa.status == SolveStatus::Optimal);
      CHECK(bpa.plan.vehicle_count == rea.result.plan.vehicle_count);
      CHECK(bpa.plan.total_distance == rea.result.plan.total_distance);
      CHECK(bpa.plan.routes.size() % 2 == 0);
      CHECK(validate_plan(inst, bpa.plan).empty());
      CHECK(bpa.stats.root_lp_nocuts <= bpa.objective + 1e-6);
      CHECK(bpa.bound <= bpa.objective + 1e-6);
    }
    CHECK(validate_plan(inst, rea.result.plan).empty());
  }
}

TEST_CASE("the lexicographic cost dominates any distance difference") {
  const Instance inst = dense(3, 6);
  const RoutePool pool = enumerate_routes(inst);
  const double c = lexicographic_fixed_cost(inst, pool, 1000);
  CHECK(c > plan_distance_bound(inst));
  CHECK(c >= 1000.0 * pool.max_distance());
  CHECK(c == std::floor(c));
}

TEST_CASE("a time limit yields a valid incumbent") {
  const Instance inst = dense(5, 12);
  BpaOptions opt;
  opt.time_limit_s = 0.0;
  const SolveResult r = solve_bpa(inst, opt);
  if (r.status != SolveStatus::NoSolution) {
    CHECK(validate_plan(inst, r.plan).empty());
    CHECK(r.gap >= 0.0);
  }
}

TEST_CASE("root heuristic bounds") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const Instance inst = dense(seed, 8);
    HeuristicOptions ho;
    ho.t_rmp_s = 30;
    ho.t_mip_s = 30;
    const HeuristicResult h = root_heuristic(inst, ho);
    REQUIRE(h.z_mip > 0);
    CHECK(validate_plan(inst, h.plan).empty());
    const ReaResult rea = solve_rea(inst);
    const double opt_vehicles = rea.result.plan.vehicle_count;
    const double true_gap = (h.z_mip - opt_vehicles) / h.z_mip;
    INFO("seed " << seed);
    CHECK(h.z_mip == doctest::Approx(h.plan.vehicle_count));
    CHECK(h.gap >= true_gap - 1e-9);
    CHECK(h.z_lb <= opt_vehicles + 1e-6);
    if (h.converged) {
      CHECK(h.farley <= h.z_rmp + 1e-6);
      CHECK(h.z_lb == doctest::Approx(h.z_rmp));
    }
  }
}

TEST_CASE("relaxed forbidden paths keep infeasible columns out of the MIP") {
  // Evening trips from one workplace. Driver 0 meets riders 1, 2 and 3 in
  // that (lexicographically first) order; rider 3 cannot leave before
  // 17:11:40 while rider 2 must be picked up by 17:05, so rider 1 rides too
  // long once the wait is counted. Picking 2 before 1 avoids it. Without
  // dominance both orders survive and the first one is priced.
  const std::vector<Point> pts{{24000, 0}, {3000, 0}, {20000, 0}, {4500, 0}, {0, 0}};
  auto travel = std::make_shared<const TravelData>(TravelModel{}.build(pts));
  const double dt2 = 17 * 3600;
  const double leave[4] = {dt2, dt2 + 400, dt2, dt2 + 1000};
  std::vector<Commuter> cs;
  for (int i = 0; i < 4; ++i) cs.push_back(make_commuter(i, i, 4, *travel, 8 * 3600, leave[i], pts[i]));
  Parameters p;
  p.delta_s = 300;
  p.detour_ratio = 0.5;
  const Instance inst = build_instance(cs, travel, p);
  const Network& out = inst.network(Direction::Outbound);
  CHECK_FALSE(is_feasible(out, std::vector<int>{0, 1, 2, 3, 4 + 1, 4 + 3, 4 + 2, 4 + 0}));
  CHECK(is_feasible(out, std::vector<int>{0, 2, 1, 3, 4 + 1, 4 + 3, 4 + 2, 4 + 0}));

  HeuristicOptions ho;
  ho.relax_forbidden = true;
  ho.preprocess = PreprocessOptions{false, false, false};
  ho.rcsp.post_prune = false;
  ho.rcsp.dominance = false;
  ho.t_rmp_s = 20;
  ho.t_mip_s = 20;
  const HeuristicResult relaxed = root_heuristic(inst, ho);
  CHECK(relaxed.infeasible_columns >= 1);
  CHECK(validate_plan(inst, relaxed.plan).empty());

  ho.relax_forbidden = false;
  const HeuristicResult strict = root_heuristic(inst, ho);
  CHECK(strict.infeasible_columns == 0);
  CHECK(validate_plan(inst, strict.plan).empty());
  CHECK(strict.plan.vehicle_count == 2);
  CHECK(solve_rea(inst).result.plan.vehicle_count == 2);
}
