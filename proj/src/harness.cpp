#include "ctsp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "ctsp/cluster.hpp"
#include "ctsp/parallel.hpp"
#include "ctsp/schedule.hpp"

namespace ctsp {

TimeMixture default_arrivals() {
  return {{0.4, 7.0 * 3600, 1800, 5.0 * 3600, 10.0 * 3600},
          {0.6, 8.25 * 3600, 1800, 5.0 * 3600, 10.0 * 3600}};
}

TimeMixture default_departures() {
  return {{0.5, 16.5 * 3600, 1800, 14.5 * 3600, 20.0 * 3600},
          {0.5, 17.75 * 3600, 2100, 14.5 * 3600, 20.0 * 3600}};
}

std::pair<double, int> sample_time(const TimeMixture& mix, std::mt19937_64& rng) {
  if (mix.empty()) throw Error("empty time mixture");
  std::vector<double> w;
  for (const TimeComponent& c : mix) {
    if (!(c.weight >= 0) || !(c.sd > 0) || !(c.low < c.high))
      throw Error("invalid time mixture component");
    w.push_back(c.weight);
  }
  std::discrete_distribution<int> pick(w.begin(), w.end());
  const int k = pick(rng);
  const TimeComponent& c = mix[k];
  std::normal_distribution<double> normal(c.mean, c.sd);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double t = normal(rng);
    if (t >= c.low && t <= c.high) return {t, k};
  }
  throw Error("time mixture truncation leaves no mass");
}

namespace {

TimeMixture mixture_from_json(const Json& j) {
  TimeMixture m;
  for (const Json& c : j)
    m.push_back({c.value("weight", 1.0), c.at("mean").get<double>(), c.at("sd").get<double>(),
                 c.value("low", 0.0), c.value("high", 86400.0)});
  return m;
}

Json mixture_to_json(const TimeMixture& m) {
  Json out = Json::array();
  for (const TimeComponent& c : m)
    out.push_back({{"weight", c.weight}, {"mean", c.mean}, {"sd", c.sd}, {"low", c.low},
                   {"high", c.high}});
  return out;
}

}  // namespace

PopulationSpec population_spec_from_json(const Json& j) {
  PopulationSpec s;
  s.count = j.value("count", s.count);
  s.extent_m = j.value("extent_m", s.extent_m);
  if (j.contains("workplaces")) {
    s.workplaces.clear();
    for (const Json& p : j["workplaces"]) s.workplaces.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  if (j.contains("arrivals")) s.arrivals = mixture_from_json(j["arrivals"]);
  if (j.contains("departures")) s.departures = mixture_from_json(j["departures"]);
  s.speed_mps = j.value("speed_mps", s.speed_mps);
  s.seed = j.value("seed", s.seed);
  return s;
}

Json population_spec_to_json(const PopulationSpec& s) {
  Json wp = Json::array();
  for (const Point& p : s.workplaces) wp.push_back({p.x, p.y});
  return Json{{"count", s.count},       {"extent_m", s.extent_m},
              {"workplaces", wp},       {"arrivals", mixture_to_json(s.arrivals)},
              {"departures", mixture_to_json(s.departures)},
              {"speed_mps", s.speed_mps}, {"seed", s.seed}};
}

Population generate_population(const PopulationSpec& spec) {
  if (spec.count < 0) throw Error("population count must be non-negative");
  if (spec.workplaces.empty()) throw Error("population needs at least one workplace");
  Population pop;
  pop.speed_mps = spec.speed_mps;
  if (spec.count == 0) return pop;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(0.0, spec.extent_m);
  std::uniform_int_distribution<int> work(0, static_cast<int>(spec.workplaces.size()) - 1);
  struct Draw {
    int workplace;
    double arrive;
    double leave;
  };
  std::vector<Draw> draws;
  for (int i = 0; i < spec.count; ++i) {
    pop.locations.push_back({coord(rng), coord(rng)});
    Draw d{work(rng), 0, 0};
    do {
      d.arrive = std::round(sample_time(spec.arrivals, rng).first);
      d.leave = std::round(sample_time(spec.departures, rng).first);
    } while (d.arrive >= d.leave);
    draws.push_back(d);
  }
  for (const Point& w : spec.workplaces) pop.locations.push_back(w);
  TravelModel model;
  model.speed_mps = spec.speed_mps;
  const TravelData travel = model.build(pop.locations);
  for (int i = 0; i < spec.count; ++i)
    pop.commuters.push_back(make_commuter(i, i, spec.count + draws[i].workplace, travel,
                                          draws[i].arrive, draws[i].leave, pop.locations[i]));
  return pop;
}

Instance population_instance(const Population& pop, const Parameters& params) {
  TravelModel model;
  model.speed_mps = pop.speed_mps;
  return build_instance(pop.commuters, pop.locations, model, params);
}

std::vector<std::string> validate_plan(const Instance& inst, const Plan& plan) {
  std::vector<std::string> issues;
  const int n = inst.n();
  std::vector<int> covered[2] = {std::vector<int>(n, 0), std::vector<int>(n, 0)};
  std::set<int> drivers[2];
  Meters total = 0;
  for (const Route& r : plan.routes) {
    const int dir = index_of(r.direction);
    const Network& net = inst.network(r.direction);
    std::ostringstream tag;
    tag << to_string(r.direction) << " route of driver " << r.driver;
    if (!is_valid(net, r.stops, inst.capacity(), r.driver)) {
      issues.push_back(tag.str() + " is not valid");
      continue;
    }
    if (!feasible(net, r.stops)) issues.push_back(tag.str() + " has no feasible schedule");
    if (route_distance(net, r.stops) != r.distance) issues.push_back(tag.str() + " distance mismatch");
    if (riders_of(net, r.stops) != r.riders) issues.push_back(tag.str() + " rider set mismatch");
    for (int c : riders_of(net, r.stops)) ++covered[dir][c];
    if (!drivers[dir].insert(r.driver).second) issues.push_back(tag.str() + " repeats a driver");
    total += r.distance;
  }
  for (int dir = 0; dir < 2; ++dir)
    for (int c = 0; c < n; ++c)
      if (covered[dir][c] != 1) {
        std::ostringstream os;
        os << "commuter " << c << " covered " << covered[dir][c] << " times "
           << to_string(static_cast<Direction>(dir));
        issues.push_back(os.str());
      }
  if (drivers[0] != drivers[1]) issues.push_back("inbound and outbound drivers differ");
  if (plan.routes.size() % 2 != 0) issues.push_back("odd route count");
  if (plan.vehicle_count != static_cast<int>(plan.routes.size()))
    issues.push_back("vehicle count does not match the routes");
  if (plan.total_distance != total) issues.push_back("total distance does not match the routes");
  return issues;
}

double average_ride(const Instance& inst, const Plan& plan) {
  double sum = 0.0;
  int trips = 0;
  for (const Route& r : plan.routes) {
    const auto s = feasible(inst.network(r.direction), r.stops);
    if (!s) throw Error("average ride: route without a schedule");
    for (const auto& [c, ride] : s->rides) {
      (void)c;
      sum += ride;
      ++trips;
    }
  }
  return trips ? sum / trips : 0.0;
}

double average_direct_ride(const Instance& inst) {
  double sum = 0.0;
  const int n = inst.n();
  for (Direction d : {Direction::Inbound, Direction::Outbound})
    for (int i = 0; i < n; ++i) sum += inst.network(d).tau(i, n + i);
  return n ? sum / (2.0 * n) : 0.0;
}

namespace {

// Shortest feasible stop order for a group with a fixed driver, by plain
// permutation of the non-driver stops.
std::optional<std::vector<int>> best_group_order(const Network& net, const std::vector<int>& group,
                                                 int driver, int capacity) {
  const int n = net.n();
  std::vector<int> middle;
  for (int c : group)
    if (c != driver) {
      middle.push_back(c);
      middle.push_back(n + c);
    }
  std::sort(middle.begin(), middle.end());
  std::optional<std::vector<int>> best;
  Meters best_d = std::numeric_limits<Meters>::max();
  std::vector<int> stops;
  do {
    stops.assign(1, driver);
    stops.insert(stops.end(), middle.begin(), middle.end());
    stops.push_back(n + driver);
    bool ok = true;
    std::set<int> seen;
    int load = net.node(driver).demand;
    for (int s : middle) {
      if (s < n) {
        seen.insert(s);
        load += net.node(s).demand;
        if (load > capacity) ok = false;
      } else {
        if (!seen.count(s - n)) ok = false;
        load -= net.node(s - n).demand;
      }
      if (!ok) break;
    }
    if (!ok) continue;
    const Meters d = route_distance(net, stops);
    if (d >= best_d) continue;
    if (!is_feasible(net, stops)) continue;
    best_d = d;
    best = stops;
  } while (std::next_permutation(middle.begin(), middle.end()));
  return best;
}

struct DirectionTable {
  // Per drivers mask: least distance of a partition with exactly these drivers.
  std::vector<Meters> dist;
  std::vector<std::vector<std::vector<int>>> routes;
};

DirectionTable best_partitions(const Instance& inst, Direction dir) {
  const Network& net = inst.network(dir);
  const int n = inst.n();
  const int K = inst.capacity();
  const int full = 1 << n;
  constexpr Meters kNone = std::numeric_limits<Meters>::max();
  // Best route for each (group, driver).
  std::vector<std::vector<std::optional<std::vector<int>>>> group(full);
  for (int q = 1; q < full; ++q) {
    group[q].resize(n);
    if (std::popcount(static_cast<unsigned>(q)) > K) continue;
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (q >> i & 1) members.push_back(i);
    for (int d : members) group[q][d] = best_group_order(net, members, d, K);
  }
  // dp over (covered, drivers).
  std::vector<Meters> dp(static_cast<std::size_t>(full) * full, kNone);
  std::vector<std::pair<int, int>> parent(dp.size(), {-1, -1});  // (group, driver)
  auto at = [&](int cov, int drv) -> std::size_t { return static_cast<std::size_t>(cov) * full + drv; };
  dp[at(0, 0)] = 0;
  for (int cov = 0; cov < full; ++cov) {
    if (cov == full - 1) continue;
    int low = 0;
    while (cov >> low & 1) ++low;
    const int rest = (full - 1) & ~cov;
    for (int drv = 0; drv < full; ++drv) {
      const Meters base = dp[at(cov, drv)];
      if (base == kNone) continue;
      for (int q = rest; q > 0; q = (q - 1) & rest) {
        if (!(q >> low & 1)) continue;
        for (int d = 0; d < n; ++d) {
          if (!(q >> d & 1) || !group[q][d]) continue;
          const Meters v = base + route_distance(net, *group[q][d]);
          const std::size_t to = at(cov | q, drv | (1 << d));
          if (v < dp[to]) {
            dp[to] = v;
            parent[to] = {q, d};
          }
        }
      }
    }
  }
  DirectionTable t;
  t.dist.assign(full, kNone);
  t.routes.resize(full);
  for (int drv = 0; drv < full; ++drv) {
    if (dp[at(full - 1, drv)] == kNone) continue;
    t.dist[drv] = dp[at(full - 1, drv)];
    int cov = full - 1, d = drv;
    while (cov) {
      const auto [q, driver] = parent[at(cov, d)];
      t.routes[drv].push_back(*group[q][driver]);
      cov &= ~q;
      d &= ~(1 << driver);
    }
  }
  return t;
}

}  // namespace

BruteForceResult brute_force_plan(const Instance& inst, int max_commuters) {
  const int n = inst.n();
  if (n > max_commuters) throw Error("brute-force plan search is limited to small instances");
  const DirectionTable in = best_partitions(inst, Direction::Inbound);
  const DirectionTable out = best_partitions(inst, Direction::Outbound);
  constexpr Meters kNone = std::numeric_limits<Meters>::max();
  BruteForceResult best;
  for (int drv = 1; drv < (1 << n); ++drv) {
    if (in.dist[drv] == kNone || out.dist[drv] == kNone) continue;
    const int vehicles = 2 * std::popcount(static_cast<unsigned>(drv));
    const Meters d = in.dist[drv] + out.dist[drv];
    if (best.found && std::make_pair(vehicles, d) >= std::make_pair(best.vehicles, best.distance))
      continue;
    best.found = true;
    best.vehicles = vehicles;
    best.distance = d;
    best.routes.clear();
    for (const auto& s : in.routes[drv]) best.routes.push_back(make_route(inst.network(Direction::Inbound), s));
    for (const auto& s : out.routes[drv]) best.routes.push_back(make_route(inst.network(Direction::Outbound), s));
  }
  return best;
}

CrossReport cross_validate(const Instance& inst, const BpaOptions& bpa_opt, int brute_limit) {
  CrossReport rep;
  auto t0 = std::chrono::steady_clock::now();
  ReaOptions ro;
  ro.threads = bpa_opt.threads;
  const ReaResult rea = solve_rea(inst, ro);
  auto t1 = std::chrono::steady_clock::now();
  const SolveResult bpa = solve_bpa(inst, bpa_opt);
  auto t2 = std::chrono::steady_clock::now();
  rep.rea_s = std::chrono::duration<double>(t1 - t0).count();
  rep.bpa_s = std::chrono::duration<double>(t2 - t1).count();
  rep.rea_vehicles = rea.result.plan.vehicle_count;
  rep.rea_distance = rea.result.plan.total_distance;
  rep.bpa_vehicles = bpa.plan.vehicle_count;
  rep.bpa_distance = bpa.plan.total_distance;
  if (rea.result.status != SolveStatus::Optimal) rep.problems.push_back("REA did not prove optimality");
  if (bpa.status != SolveStatus::Optimal) rep.problems.push_back("BPA did not prove optimality");
  for (const auto& p : validate_plan(inst, rea.result.plan)) rep.problems.push_back("REA: " + p);
  for (const auto& p : validate_plan(inst, bpa.plan)) rep.problems.push_back("BPA: " + p);
  rep.agree = rep.rea_vehicles == rep.bpa_vehicles && rep.rea_distance == rep.bpa_distance;
  if (!rep.agree) {
    std::ostringstream os;
    os << "REA (" << rep.rea_vehicles << ", " << rep.rea_distance << ") vs BPA (" << rep.bpa_vehicles
       << ", " << rep.bpa_distance << ")";
    rep.problems.push_back(os.str());
  }
  if (inst.n() <= brute_limit) {
    const BruteForceResult b = brute_force_plan(inst, brute_limit);
    rep.brute_checked = true;
    rep.brute_vehicles = b.vehicles;
    rep.brute_distance = b.distance;
    if (!b.found || b.vehicles != rep.rea_vehicles || b.distance != rep.rea_distance) {
      rep.agree = false;
      std::ostringstream os;
      os << "brute force (" << b.vehicles << ", " << b.distance << ") vs REA (" << rep.rea_vehicles
         << ", " << rep.rea_distance << ")";
      rep.problems.push_back(os.str());
    }
  }
  if (!rep.problems.empty()) rep.agree = false;
  return rep;
}

const char* const kRunRecordHeader =
    "cell,cluster,cluster_size,capacity,delta_s,detour_ratio,algorithm,status,columns,"
    "inbound_edges,outbound_edges,tree_nodes,vehicle_count,total_distance,optimality_gap,"
    "integrality_gap,average_ride_s,rmp_convergence_s,root_solution_s,best_solution_s,total_s,error";

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_csv_row(std::ostream& os, const RunRecord& r) {
  os << csv_field(r.cell) << ',' << r.cluster << ',' << r.cluster_size << ',' << r.capacity << ','
     << r.delta_s << ',' << r.detour_ratio << ',' << r.algorithm << ',' << r.status << ','
     << r.columns << ',' << r.inbound_edges << ',' << r.outbound_edges << ',' << r.tree_nodes << ','
     << r.vehicle_count << ',' << r.total_distance << ',' << r.optimality_gap << ','
     << r.integrality_gap << ',' << r.average_ride_s << ',' << r.rmp_convergence_s << ','
     << r.root_solution_s << ',' << r.best_solution_s << ',' << r.total_s << ','
     << csv_field(r.error) << '\n';
}

const char* const kCellSummaryHeader =
    "cell,algorithm,capacity,cluster_size,delta_s,detour_ratio,commuters,vehicle_count,"
    "total_distance,average_ride_s,vehicle_pct,distance_pct,failures";

void write_csv_row(std::ostream& os, const CellSummary& s) {
  os << csv_field(s.cell) << ',' << s.algorithm << ',' << s.capacity << ',' << s.cluster_size << ','
     << s.delta_s << ',' << s.detour_ratio << ',' << s.commuters << ',' << s.vehicle_count << ','
     << s.total_distance << ',' << s.average_ride_s << ',' << s.vehicle_pct << ','
     << s.distance_pct << ',' << s.failures << '\n';
}

RunRecord solve_and_record(const Instance& inst, const SolveSettings& s, Plan* plan_out) {
  RunRecord rec;
  rec.cluster_size = inst.n();
  rec.capacity = inst.capacity();
  rec.delta_s = inst.params().delta_s;
  rec.detour_ratio = inst.params().detour_ratio;
  rec.algorithm = s.algorithm;
  Plan plan;
  try {
    if (s.algorithm == "rea") {
      ReaOptions o;
      o.threads = s.threads;
      o.mip_budget_s = s.time_limit_s;
      const ReaResult r = solve_rea(inst, o);
      rec.status = to_string(r.result.status);
      rec.columns = r.columns;
      rec.optimality_gap = r.result.gap;
      if (r.result.objective > 0)
        rec.integrality_gap = std::max(0.0, (r.result.objective - r.result.stats.root_lp) / r.result.objective);
      rec.root_solution_s = r.result.stats.total_s;
      rec.best_solution_s = r.result.stats.total_s;
      rec.total_s = r.result.stats.total_s;
      if (r.result.status == SolveStatus::NoSolution) throw Error("no solution");
      plan = r.result.plan;
    } else if (s.algorithm == "bpa") {
      BpaOptions o;
      o.threads = s.threads;
      o.time_limit_s = s.time_limit_s;
      const SolveResult r = solve_bpa(inst, o);
      rec.status = to_string(r.status);
      rec.columns = r.stats.columns;
      rec.inbound_edges = r.stats.inbound_edges;
      rec.outbound_edges = r.stats.outbound_edges;
      rec.tree_nodes = r.stats.tree_nodes;
      rec.optimality_gap = r.gap;
      if (r.objective > 0)
        rec.integrality_gap = std::max(0.0, (r.objective - r.stats.root_lp_nocuts) / r.objective);
      rec.rmp_convergence_s = r.stats.rmp_convergence_s;
      rec.root_solution_s = r.stats.root_solution_s;
      rec.best_solution_s = r.stats.best_solution_s;
      rec.total_s = r.stats.total_s;
      if (r.status == SolveStatus::NoSolution) throw Error("no solution");
      plan = r.plan;
    } else if (s.algorithm == "heuristic") {
      HeuristicOptions o;
      o.threads = s.threads;
      o.t_rmp_s = s.t_rmp_s;
      o.t_mip_s = s.t_mip_s;
      o.relax_forbidden = s.relax_forbidden;
      const HeuristicResult r = root_heuristic(inst, o);
      rec.status = to_string(r.status);
      rec.columns = r.columns;
      rec.optimality_gap = r.gap;
      rec.rmp_convergence_s = r.rmp_s;
      rec.root_solution_s = r.total_s;
      rec.best_solution_s = r.total_s;
      rec.total_s = r.total_s;
      if (r.plan.routes.empty()) throw Error("no solution");
      plan = r.plan;
    } else {
      throw Error("unknown algorithm '" + s.algorithm + "'");
    }
    const auto issues = validate_plan(inst, plan);
    if (!issues.empty()) throw Error("invalid plan: " + issues.front());
    rec.vehicle_count = plan.vehicle_count;
    rec.total_distance = plan.total_distance;
    rec.average_ride_s = average_ride(inst, plan);
  } catch (const std::exception& e) {
    rec.error = e.what();
    if (rec.status.empty()) rec.status = "error";
  }
  if (plan_out) *plan_out = std::move(plan);
  return rec;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig c;
  c.population = j.value("population", c.population);
  if (j.contains("algorithms")) c.algorithms = j["algorithms"].get<std::vector<std::string>>();
  if (j.contains("capacities")) c.capacities = j["capacities"].get<std::vector<int>>();
  if (j.contains("cluster_sizes")) c.cluster_sizes = j["cluster_sizes"].get<std::vector<int>>();
  if (j.contains("deltas_s")) c.deltas_s = j["deltas_s"].get<std::vector<double>>();
  if (j.contains("detour_ratios")) c.detour_ratios = j["detour_ratios"].get<std::vector<double>>();
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  c.solve.time_limit_s = j.value("time_limit_s", c.solve.time_limit_s);
  c.solve.t_rmp_s = j.value("t_rmp_s", c.solve.t_rmp_s);
  c.solve.t_mip_s = j.value("t_mip_s", c.solve.t_mip_s);
  c.solve.relax_forbidden = j.value("relax_forbidden", c.solve.relax_forbidden);
  c.solve.threads = j.value("threads", c.solve.threads);
  c.workers = j.value("workers", c.workers);
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Instance& population) {
  struct Cell {
    std::string algorithm;
    int capacity;
    int cluster_size;
    double delta;
    double ratio;
  };
  std::vector<Cell> cells;
  for (const auto& a : cfg.algorithms)
    for (int k : cfg.capacities)
      for (int nsize : cfg.cluster_sizes)
        for (double d : cfg.deltas_s)
          for (double r : cfg.detour_ratios) cells.push_back({a, k, nsize, d, r});

  // Clusterings depend only on the size limit.
  std::map<int, std::vector<std::vector<int>>> groups;
  for (int nsize : cfg.cluster_sizes) {
    if (groups.count(nsize)) continue;
    if (nsize <= 0 || nsize >= population.n()) {
      std::vector<int> all(population.n());
      for (int i = 0; i < population.n(); ++i) all[i] = i;
      groups[nsize] = {all};
      continue;
    }
    ClusterOptions co;
    co.max_size = nsize;
    co.restarts = cfg.restarts;
    co.seed = cfg.seed;
    co.threads = cfg.solve.threads;
    groups[nsize] = cluster_commuters(population.commuters(), co).members();
  }

  double direct_distance = 0.0;
  {
    const int n = population.n();
    for (Direction d : {Direction::Inbound, Direction::Outbound})
      for (int i = 0; i < n; ++i)
        direct_distance += static_cast<double>(population.network(d).dist(i, n + i));
  }

  ExperimentResult out;
  std::vector<std::vector<RunRecord>> per_cell(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    const Cell& cell = cells[c];
    std::ostringstream label;
    label << cell.algorithm << "_K" << cell.capacity << "_N" << cell.cluster_size << "_D"
          << cell.delta << "_R" << cell.ratio;
    Parameters p = population.params();
    p.capacity = cell.capacity;
    p.delta_s = cell.delta;
    p.detour_ratio = cell.ratio;
    const Instance inst = with_parameters(population, p);
    SolveSettings s = cfg.solve;
    s.algorithm = cell.algorithm;
    const auto& members = groups.at(cell.cluster_size);
    for (std::size_t g = 0; g < members.size(); ++g) {
      if (members[g].empty()) continue;
      RunRecord rec = solve_and_record(subinstance(inst, members[g]), s);
      rec.cell = label.str();
      rec.cluster = static_cast<int>(g);
      per_cell[c].push_back(std::move(rec));
    }
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    CellSummary sum;
    sum.algorithm = cell.algorithm;
    sum.capacity = cell.capacity;
    sum.cluster_size = cell.cluster_size;
    sum.delta_s = cell.delta;
    sum.detour_ratio = cell.ratio;
    double ride_weighted = 0.0;
    for (const RunRecord& r : per_cell[c]) {
      sum.cell = r.cell;
      sum.commuters += r.cluster_size;
      if (!r.error.empty()) {
        ++sum.failures;
        continue;
      }
      sum.vehicle_count += r.vehicle_count;
      sum.total_distance += r.total_distance;
      ride_weighted += r.average_ride_s * r.cluster_size;
    }
    if (sum.commuters > 0) {
      sum.average_ride_s = ride_weighted / sum.commuters;
      sum.vehicle_pct = 100.0 * sum.vehicle_count / (2.0 * sum.commuters);
    }
    if (direct_distance > 0) sum.distance_pct = 100.0 * static_cast<double>(sum.total_distance) / direct_distance;
    out.cells.push_back(sum);
    for (RunRecord& r : per_cell[c]) out.runs.push_back(std::move(r));
  }
  return out;
}

void write_experiment(const ExperimentResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw Error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    f << kRunRecordHeader << '\n';
    for (const RunRecord& x : r.runs) write_csv_row(f, x);
  }
  {
    auto f = open("cells.csv");
    f << kCellSummaryHeader << '\n';
    for (const CellSummary& x : r.cells) write_csv_row(f, x);
  }
  // One file per swept parameter, rows ordered by that parameter.
  struct Sweep {
    const char* name;
    double (*key)(const CellSummary&);
  };
  const Sweep sweeps[] = {
      {"by_capacity.csv", [](const CellSummary& s) { return static_cast<double>(s.capacity); }},
      {"by_cluster_size.csv", [](const CellSummary& s) { return static_cast<double>(s.cluster_size); }},
      {"by_delta.csv", [](const CellSummary& s) { return s.delta_s; }},
      {"by_detour_ratio.csv", [](const CellSummary& s) { return s.detour_ratio; }},
  };
  for (const Sweep& sw : sweeps) {
    std::set<double> values;
    for (const CellSummary& s : r.cells) values.insert(sw.key(s));
    if (values.size() < 2) continue;
    std::vector<CellSummary> rows = r.cells;
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const CellSummary& a, const CellSummary& b) { return sw.key(a) < sw.key(b); });
    auto f = open(sw.name);
    f << kCellSummaryHeader << '\n';
    for (const CellSummary& x : rows) write_csv_row(f, x);
  }
}

}  // namespace ctsp
