#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "ctsp/enumerate.hpp"
#include "ctsp/lp.hpp"
#include "ctsp/model.hpp"
#include "ctsp/schedule.hpp"

namespace fixtures {

struct RandomSpec {
  int n = 6;
  int workplaces = 2;
  double side_m = 4000.0;
  double arrival_spread_s = 900.0;
  ctsp::Parameters params{};
};

// Homes scattered in a square, workplaces near its center, arrivals around
// 8:00 and departures around 17:00.
inline ctsp::Instance random_instance(unsigned seed, const RandomSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, spec.side_m);
  std::uniform_real_distribution<double> center(0.4 * spec.side_m, 0.6 * spec.side_m);
  std::uniform_real_distribution<double> jitter(-spec.arrival_spread_s, spec.arrival_spread_s);
  std::vector<ctsp::Point> points;
  for (int i = 0; i < spec.n; ++i) points.push_back({coord(rng), coord(rng)});
  for (int w = 0; w < spec.workplaces; ++w) points.push_back({center(rng), center(rng)});
  ctsp::TravelModel model;
  auto travel = std::make_shared<const ctsp::TravelData>(model.build(points));
  std::uniform_int_distribution<int> pick(0, spec.workplaces - 1);
  std::vector<ctsp::Commuter> cs;
  for (int i = 0; i < spec.n; ++i) {
    const int work = spec.n + pick(rng);
    const double arrive = std::round(8 * 3600 + jitter(rng));
    const double leave = std::round(17 * 3600 + jitter(rng));
    cs.push_back(ctsp::make_commuter(i, i, work, *travel, arrive, leave, points[i]));
  }
  return ctsp::build_instance(std::move(cs), travel, spec.params);
}

// Every elementary stop sequence of `dir` with driver `d` and at most
// `capacity` commuters that admits a schedule.
inline std::vector<std::vector<int>> all_feasible_routes(const ctsp::Instance& inst,
                                                         ctsp::Direction dir, int d,
                                                         int capacity) {
  const ctsp::Network& net = inst.network(dir);
  const int n = inst.n();
  std::vector<std::vector<int>> out;
  std::vector<int> others;
  for (int i = 0; i < n; ++i)
    if (i != d) others.push_back(i);
  const int m = static_cast<int>(others.size());
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) + 1 > capacity) continue;
    std::vector<int> q{d};
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1u) q.push_back(others[k]);
    std::sort(q.begin(), q.end());
    ctsp::valid_orderings(net, q, d, capacity, [&](const std::vector<int>& stops) {
      if (ctsp::is_feasible(net, stops)) out.push_back(stops);
    });
  }
  return out;
}

// Random valid stop sequence over `riders` (driver first), interleaving
// pickups and drop-offs uniformly among the moves capacity allows.
inline std::vector<int> random_valid_route(const ctsp::Network& net, std::vector<int> riders,
                                           int driver, int capacity, std::mt19937_64& rng) {
  const int n = net.n();
  std::vector<int> stops{driver};
  std::vector<int> waiting, onboard;
  for (int c : riders)
    if (c != driver) waiting.push_back(c);
  int load = net.node(driver).demand;
  while (!waiting.empty() || !onboard.empty()) {
    std::vector<std::pair<bool, int>> moves;
    for (std::size_t k = 0; k < waiting.size(); ++k)
      if (load + net.node(waiting[k]).demand <= capacity) moves.push_back({true, static_cast<int>(k)});
    for (std::size_t k = 0; k < onboard.size(); ++k) moves.push_back({false, static_cast<int>(k)});
    const auto [pickup, k] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    if (pickup) {
      const int c = waiting[k];
      waiting.erase(waiting.begin() + k);
      onboard.push_back(c);
      load += net.node(c).demand;
      stops.push_back(c);
    } else {
      const int c = onboard[k];
      onboard.erase(onboard.begin() + k);
      load -= net.node(c).demand;
      stops.push_back(n + c);
    }
  }
  stops.push_back(n + driver);
  return stops;
}

// Route scheduling written directly as a linear program over the service
// start times and solved with the simplex code: origin windows, destination
// deadlines, travel with waiting allowed only before pickups, ride limits,
// minimizing the driver's trip duration. Absent when infeasible.
inline std::optional<double> lp_schedule_duration(const ctsp::Network& net,
                                                  const std::vector<int>& stops) {
  namespace lp = ctsp::lp;
  const int n = net.n();
  const int m = static_cast<int>(stops.size());
  double base = std::numeric_limits<double>::infinity();
  for (int s : stops)
    if (s < n) base = std::min(base, net.node(s).window_start);
  lp::LinearProgram prog;
  std::vector<int> var(m);
  for (int k = 0; k < m; ++k) {
    const ctsp::Location& loc = net.node(stops[k]);
    const double lo = stops[k] < n ? loc.window_start - base : -lp::kInf;
    var[k] = prog.add_variable(0.0, lo, loc.window_end - base);
  }
  prog.objective[var[m - 1]] = 1.0;
  prog.objective[var[0]] = -1.0;
  for (int k = 1; k < m; ++k) {
    const double gap = net.node(stops[k - 1]).service + net.tau(stops[k - 1], stops[k]);
    prog.add_row({{var[k], 1.0}, {var[k - 1], -1.0}},
                 stops[k] < n ? lp::Relation::GreaterEqual : lp::Relation::Equal, gap);
  }
  std::vector<int> pos(2 * n, -1);
  for (int k = 0; k < m; ++k) pos[stops[k]] = k;
  for (int k = 0; k < m; ++k) {
    const int c = stops[k];
    if (c >= n) continue;
    const ctsp::Location& o = net.node(c);
    prog.add_row({{var[pos[n + c]], 1.0}, {var[k], -1.0}}, lp::Relation::LessEqual,
                 o.ride_limit + o.service);
  }
  const lp::LpSolution sol = lp::solve_lp(prog);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  return sol.objective;
}

}  // namespace fixtures
