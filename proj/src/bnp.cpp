#include "ctsp/bnp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "ctsp/parallel.hpp"
#include "ctsp/schedule.hpp"

namespace ctsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Clock::time_point deadline_after(Clock::time_point t0, double s) {
  if (!std::isfinite(s)) return Clock::time_point::max();
  return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

double integral_eps(double z) { return 1e-10 * std::abs(z) + 1e-6; }
double ceil_tol(double z) { return std::ceil(z - integral_eps(z)); }

double fractionality(double v) { return std::min(v - std::floor(v), std::ceil(v) - v); }

std::vector<int> singleton_columns(const Rmp& rmp) {
  std::vector<int> ids;
  for (std::size_t id = 0; id < rmp.size(); ++id)
    if (rmp.columns()[id].route.riders.size() == 1) ids.push_back(static_cast<int>(id));
  return ids;
}

// Column generation machinery shared by the exact search and the root-node
// heuristic: base pricing graphs, per-node graph copies and the column pool.
class Engine {
 public:
  struct Round {
    int added = 0;
    double rc_star = std::numeric_limits<double>::infinity();
    long calls = 0;
  };

  Engine(const Instance& inst, Rmp& rmp, const PreprocessOptions& pre, const RcspOptions& rcsp,
         bool forbid_infeasible, int threads)
      : inst_(inst), rmp_(rmp), threads_(threads) {
    price_.rcsp = rcsp;
    price_.forbid_infeasible = forbid_infeasible;
    const int n = inst.n();
    for (int dir = 0; dir < 2; ++dir) base_[dir].resize(n);
    parallel_for(2 * static_cast<std::size_t>(n), threads, [&](std::size_t k) {
      const int dir = static_cast<int>(k) / n;
      const int d = static_cast<int>(k) % n;
      base_[dir][d] = std::make_unique<PricingGraph>(inst, static_cast<Direction>(dir), d, pre);
    });
    feasible_.assign(rmp.size(), 1);
  }

  long edge_count(Direction dir) const {
    long e = 0;
    for (const auto& g : base_[index_of(dir)]) e += static_cast<long>(g->edge_count());
    return e;
  }

  const std::vector<char>& column_feasible() const { return feasible_; }
  long infeasible_columns() const {
    return static_cast<long>(std::count(feasible_.begin(), feasible_.end(), 0));
  }
  long pricing_calls() const { return calls_; }
  long infeasible_candidates() const { return infeasible_candidates_; }
  long labels() const { return labels_; }

  // Node graphs and the column mask for a node's fixings.
  void enter(const BranchNode& node) {
    node_ = node;
    const int n = inst_.n();
    banned_ = banned_drivers(node, n);
    for (int dir = 0; dir < 2; ++dir) {
      graphs_[dir].clear();
      graphs_[dir].resize(n);
      for (int d = 0; d < n; ++d) {
        if (banned_[d]) continue;
        auto g = std::make_unique<PricingGraph>(*base_[dir][d]);
        for (const EdgeFixing& f : node.edges) {
          if (index_of(f.direction) != dir) continue;
          if (!f.value) {
            g->remove_edge(f.from, f.to);
            continue;
          }
          for (int k = 0; k < g->size(); ++k) {
            if (k != f.to) g->remove_edge(f.from, k);
            if (k != f.from) g->remove_edge(k, f.to);
          }
        }
        graphs_[dir][d] = std::move(g);
      }
    }
    active_.assign(rmp_.size(), 0);
    for (std::size_t id = 0; id < rmp_.size(); ++id)
      active_[id] = column_allowed(rmp_.columns()[id].route, node, banned_);
  }

  const std::vector<char>& active() const { return active_; }

  Round price(const Duals& y, bool farkas, double tol) {
    struct Job {
      int dir;
      int d;
    };
    std::vector<Job> jobs;
    for (int dir = 0; dir < 2; ++dir)
      for (int d = 0; d < inst_.n(); ++d)
        if (graphs_[dir][d]) jobs.push_back({dir, d});
    const CostModel zero{0.0, 0.0};
    const PricingCosts costs{farkas ? zero : rmp_.objective_model(), rmp_.cut_model(), y};
    std::vector<std::optional<PricedRoute>> out(jobs.size());
    std::vector<RcspStats> stats(jobs.size());
    parallel_for(jobs.size(), threads_, [&](std::size_t k) {
      PricingGraph& g = *graphs_[jobs[k].dir][jobs[k].d];
      g.set_costs(costs);
      out[k] = price_driver(g, price_, &stats[k]);
    });

    Round round;
    round.calls = static_cast<long>(jobs.size());
    calls_ += round.calls;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      labels_ += stats[k].labels;
      PricingGraph& g = *graphs_[jobs[k].dir][jobs[k].d];
      PricingGraph& base = *base_[jobs[k].dir][jobs[k].d];
      for (std::size_t f = base.forbidden().size(); f < g.forbidden().size(); ++f)
        base.forbid(g.forbidden()[f]);
      if (!out[k]) continue;
      const PricedRoute& pr = *out[k];
      infeasible_candidates_ += pr.rounds - 1 + (pr.feasible ? 0 : 1);
      round.rc_star = std::min(round.rc_star, pr.reduced_cost);
      if (pr.reduced_cost >= -tol) continue;
      const int id = rmp_.add(pr.route);
      if (id < 0) continue;
      ++round.added;
      feasible_.push_back(pr.feasible ? 1 : 0);
      active_.push_back(column_allowed(pr.route, node_, banned_));
    }
    return round;
  }

 private:
  const Instance& inst_;
  Rmp& rmp_;
  int threads_;
  PriceOptions price_;
  std::vector<std::unique_ptr<PricingGraph>> base_[2];
  std::vector<std::unique_ptr<PricingGraph>> graphs_[2];
  BranchNode node_;
  std::vector<char> banned_;
  std::vector<char> active_;
  std::vector<char> feasible_;
  long calls_ = 0;
  long infeasible_candidates_ = 0;
  long labels_ = 0;
};

struct CgOutcome {
  enum Kind { Optimal, Infeasible, Timeout } kind = Infeasible;
  RmpResult lp;
  double lower = -std::numeric_limits<double>::infinity();  // best Lübbecke bound
  double rc_star = 0.0;
  bool converged = false;
  int iterations = 0;
};

enum class StopRule { Converged, Parity, Integral };

struct CgSettings {
  double tol = 1e-6;
  double fixed_cost = 1.0;
  double distance_bound = 0.0;  // upper bound on the distance part of any plan
  StopRule rule = StopRule::Converged;
  Clock::time_point deadline = Clock::time_point::max();
  std::function<void(const RmpResult&, const Engine::Round&)> on_round;
};

double selected_count(const RmpResult& r) {
  double s = 0.0;
  for (double v : r.x) s += v;
  return s;
}

CgOutcome column_generation(Engine& eng, const Rmp& rmp, lp::Basis& basis,
                            const CgSettings& cfg) {
  CgOutcome out;
  const double lambda = 2.0 * rmp.n();
  while (true) {
    if (Clock::now() > cfg.deadline) {
      out.kind = CgOutcome::Timeout;
      return out;
    }
    RmpResult r = rmp.solve(eng.active(), basis.empty() ? nullptr : &basis);
    ++out.iterations;
    if (r.status == lp::Status::Infeasible) {
      basis = lp::Basis{};
      const Engine::Round round = eng.price(r.duals, true, 1e-9);
      if (round.added == 0) {
        out.kind = CgOutcome::Infeasible;
        return out;
      }
      continue;
    }
    if (r.status != lp::Status::Optimal) throw Error("master LP ended with status " +
                                                     std::string(lp::to_string(r.status)));
    basis = r.basis;
    const Engine::Round round = eng.price(r.duals, false, cfg.tol);
    const double rc = std::min(0.0, std::isfinite(round.rc_star) ? round.rc_star : 0.0);
    out.rc_star = rc;
    out.lower = std::max(out.lower, r.objective + lambda * rc);
    if (cfg.on_round) cfg.on_round(r, round);
    out.lp = std::move(r);
    out.kind = CgOutcome::Optimal;
    if (round.added == 0) {
      out.converged = true;
      out.lower = std::max(out.lower, out.lp.objective);
      return out;
    }
    if (cfg.rule == StopRule::Parity) {
      const double chi = selected_count(out.lp);
      const double chi_lb = (out.lower - cfg.distance_bound) / cfg.fixed_cost;
      if (2.0 * std::ceil(chi / 2.0 - 1e-9) - chi_lb < 2.0) return out;
    } else if (cfg.rule == StopRule::Integral) {
      if (ceil_tol(out.lp.objective) - out.lower < 1.0) return out;
    }
  }
}

bool is_integral(const RmpResult& r, double tol) {
  for (double v : r.x)
    if (fractionality(v) > tol) return false;
  return true;
}

std::vector<int> selected_columns(const std::vector<double>& x) {
  std::vector<int> ids;
  for (std::size_t id = 0; id < x.size(); ++id)
    if (x[id] > 0.5) ids.push_back(static_cast<int>(id));
  return ids;
}

Plan plan_of(const Instance& inst, const Rmp& rmp, const std::vector<int>& ids, double objective,
             double gap) {
  std::vector<Route> routes;
  for (int id : ids) routes.push_back(rmp.columns()[id].route);
  return make_plan(inst, std::move(routes), objective, gap);
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NoSolution: return "no_solution";
  }
  return "?";
}

std::vector<char> banned_drivers(const BranchNode& node, int n) {
  std::vector<char> banned(n, 0);
  for (int i = 0; i < n && i < static_cast<int>(node.driver.size()); ++i)
    if (node.driver[i] == 0) banned[i] = 1;
  for (const EdgeFixing& f : node.edges) {
    if (!f.value) continue;
    if (f.to < n) banned[f.to] = 1;
    if (f.from >= n) banned[f.from - n] = 1;
  }
  return banned;
}

bool column_allowed(const Route& route, const BranchNode& node, const std::vector<char>& banned) {
  if (route.driver >= 0 && route.driver < static_cast<int>(banned.size()) && banned[route.driver])
    return false;
  for (const EdgeFixing& f : node.edges) {
    if (f.direction != route.direction) continue;
    for (std::size_t k = 1; k < route.stops.size(); ++k) {
      const int a = route.stops[k - 1];
      const int b = route.stops[k];
      if (!f.value) {
        if (a == f.from && b == f.to) return false;
      } else if ((a == f.from) != (b == f.to)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> driver_values(const Rmp& rmp, const std::vector<double>& x) {
  std::vector<double> v(rmp.n(), 0.0);
  for (std::size_t id = 0; id < x.size() && id < rmp.size(); ++id) {
    const Route& r = rmp.columns()[id].route;
    if (r.direction == Direction::Inbound) v[r.driver] += x[id];
  }
  return v;
}

std::vector<std::pair<std::pair<int, int>, double>> edge_flows(const Rmp& rmp,
                                                               const std::vector<double>& x,
                                                               Direction dir) {
  std::map<std::pair<int, int>, double> flow;
  for (std::size_t id = 0; id < x.size() && id < rmp.size(); ++id) {
    if (x[id] == 0.0) continue;
    const Route& r = rmp.columns()[id].route;
    if (r.direction != dir) continue;
    for (std::size_t k = 1; k < r.stops.size(); ++k) flow[{r.stops[k - 1], r.stops[k]}] += x[id];
  }
  return {flow.begin(), flow.end()};
}

std::vector<BranchNode> branch(const Rmp& rmp, const std::vector<double>& x,
                               const BranchNode& node, double tol) {
  std::vector<BranchNode> children;
  auto child = [&] {
    BranchNode c = node;
    c.depth = node.depth + 1;
    if (c.driver.empty()) c.driver.assign(rmp.n(), -1);
    return c;
  };

  const std::vector<double> v = driver_values(rmp, x);
  int pick = -1;
  double best = tol;
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (fractionality(v[i]) > best) {
      best = fractionality(v[i]);
      pick = i;
    }
  if (pick >= 0) {
    for (signed char value : {1, 0}) {
      BranchNode c = child();
      c.driver[pick] = value;
      children.push_back(std::move(c));
    }
    return children;
  }

  std::optional<EdgeFixing> chosen[2];
  for (Direction dir : {Direction::Inbound, Direction::Outbound}) {
    double most = tol;
    for (const auto& [edge, f] : edge_flows(rmp, x, dir))
      if (fractionality(f) > most) {
        most = fractionality(f);
        chosen[index_of(dir)] = EdgeFixing{dir, edge.first, edge.second, true};
      }
  }
  std::vector<EdgeFixing> picked;
  for (const auto& c : chosen)
    if (c) picked.push_back(*c);
  if (picked.empty()) return children;
  const int combos = 1 << picked.size();
  for (int m = combos - 1; m >= 0; --m) {
    BranchNode c = child();
    for (std::size_t k = 0; k < picked.size(); ++k) {
      EdgeFixing f = picked[k];
      f.value = (m >> (picked.size() - 1 - k)) & 1;
      c.edges.push_back(f);
    }
    children.push_back(std::move(c));
  }
  return children;
}

double lexicographic_fixed_cost(const Instance& inst, const RoutePool& pool, double multiplier) {
  const double by_pool = std::ceil(fixed_cost(pool, multiplier));
  return std::max(by_pool, plan_distance_bound(inst) + 1.0);
}

SolveResult solve_bpa(const Instance& inst, const BpaOptions& opt) {
  const auto t0 = Clock::now();
  const auto deadline = deadline_after(t0, opt.time_limit_s);
  const int n = inst.n();
  auto log = [&](const std::string& s) {
    if (opt.log) opt.log(s);
  };

  EnumerateOptions seed_opt;
  seed_opt.capacity = std::max(1, std::min(opt.seed_capacity, inst.capacity()));
  seed_opt.threads = opt.threads;
  const RoutePool seed = enumerate_routes(inst, seed_opt);
  const double cbar = opt.fixed_cost > 0
                          ? opt.fixed_cost
                          : lexicographic_fixed_cost(inst, seed, inst.params().fixed_cost_multiplier);
  const CostModel model{cbar, 1.0};
  Rmp rmp(inst, model, model);
  rmp.add_pool(seed);
  const bool integral = cbar == std::floor(cbar);

  SolveResult result;
  BpaStats& st = result.stats;
  st.fixed_cost = cbar;
  st.seed_columns = static_cast<long>(rmp.size());

  Engine eng(inst, rmp, opt.preprocess, opt.rcsp, true, opt.threads);
  st.inbound_edges = eng.edge_count(Direction::Inbound);
  st.outbound_edges = eng.edge_count(Direction::Outbound);

  CgSettings cfg;
  cfg.tol = std::max(1e-6, 1e-9 * cbar);
  cfg.fixed_cost = cbar;
  cfg.distance_bound = plan_distance_bound(inst);
  cfg.deadline = deadline;
  cfg.rule = integral ? StopRule::Integral : StopRule::Converged;
  cfg.on_round = [&](const RmpResult& r, const Engine::Round&) {
    ++st.cg_iterations;
    if (r.duals.nu >= 1.0) {
      std::ostringstream os;
      os << "objective cut dual " << r.duals.nu << " makes distance weights non-positive";
      log(os.str());
    }
  };

  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<int> best_cols;
  auto improves = [&](double z) { return z < incumbent - (integral ? 0.5 : 1e-9 * std::abs(z)); };
  auto offer = [&](double z, std::vector<int> cols) {
    if (!improves(z)) return;
    incumbent = z;
    best_cols = std::move(cols);
    st.best_solution_s = seconds_since(t0);
    std::ostringstream os;
    os << "incumbent " << z << " (" << best_cols.size() << " routes)";
    log(os.str());
  };
  auto prunable = [&](double bound) {
    if (!std::isfinite(incumbent)) return false;
    return integral ? incumbent - bound < 1.0 : bound >= incumbent - 1e-9 * std::abs(incumbent);
  };
  auto run_pool_mip = [&] {
    const double left = std::chrono::duration<double>(deadline - Clock::now()).count();
    const double budget = std::max(0.0, std::min(opt.mip_budget_s, left));
    const std::vector<int> warm = best_cols.empty() ? singleton_columns(rmp) : best_cols;
    const PoolMipResult m = mip_over_pool(rmp, budget, nullptr, &warm);
    if (m.has_solution) offer(m.objective, m.selected);
  };

  // Root: stage 1 (parity), stage 2 (objective), then the pool MIP.
  BranchNode root;
  root.driver.assign(n, -1);
  eng.enter(root);
  lp::Basis basis;
  bool timed_out = false;
  CgOutcome cg;
  if (opt.use_cuts && integral) {
    CgSettings s1 = cfg;
    s1.rule = StopRule::Parity;
    cg = column_generation(eng, rmp, basis, s1);
    if (cg.kind == CgOutcome::Optimal) {
      st.root_lp_nocuts = cg.converged ? cg.lp.objective : cg.lower;
      const double chi_lb = (cg.lower - cfg.distance_bound) / cbar;
      const double rhs = 2.0 * std::ceil(chi_lb / 2.0 - 1e-9);
      rmp.cuts().parity_rhs = std::max(rmp.cuts().parity_rhs, rhs);
      cg = column_generation(eng, rmp, basis, cfg);
      if (cg.kind == CgOutcome::Optimal) {
        rmp.cuts().objective_rhs = std::max(rmp.cuts().objective_rhs, ceil_tol(cg.lower));
        cg = column_generation(eng, rmp, basis, cfg);
      }
    }
  } else {
    cg = column_generation(eng, rmp, basis, cfg);
    if (cg.kind == CgOutcome::Optimal) st.root_lp_nocuts = cg.lp.objective;
  }
  st.rmp_convergence_s = seconds_since(t0);
  if (cg.kind == CgOutcome::Infeasible) throw Error("master problem is infeasible at the root");

  struct Open {
    BranchNode node;
    lp::Basis basis;
  };
  std::vector<Open> stack;
  double root_bound = -std::numeric_limits<double>::infinity();

  // Finishes a node whose column generation returned; pushes children.
  auto settle = [&](BranchNode& node, CgOutcome& out, lp::Basis& b) {
    if (out.kind != CgOutcome::Optimal) return;
    double bound = std::max(node.bound, integral ? ceil_tol(out.lower) : out.lower);
    while (is_integral(out.lp, 1e-6)) {
      offer(out.lp.objective, selected_columns(out.lp.x));
      if (out.converged || prunable(bound)) return;
      // Stopped early on an integral point: finish the node exactly.
      CgSettings full = cfg;
      full.rule = StopRule::Converged;
      out = column_generation(eng, rmp, b, full);
      if (out.kind != CgOutcome::Optimal) {
        if (out.kind == CgOutcome::Timeout) timed_out = true;
        return;
      }
      bound = std::max(bound, integral ? ceil_tol(out.lower) : out.lower);
    }
    if (prunable(bound)) return;
    auto children = branch(rmp, out.lp.x, node);
    if (children.empty()) throw Error("fractional master solution with integral flows");
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      it->bound = bound;
      stack.push_back({std::move(*it), b});
    }
  };

  if (cg.kind == CgOutcome::Optimal) {
    st.root_lp = cg.lp.objective;
    root_bound = integral ? ceil_tol(cg.lower) : cg.lower;
    run_pool_mip();
    st.root_solution_s = seconds_since(t0);
    st.tree_nodes = 1;
    settle(root, cg, basis);
  } else {
    timed_out = true;
    run_pool_mip();
  }

  double open_min = root_bound;
  while (!stack.empty() && !timed_out) {
    open_min = std::numeric_limits<double>::infinity();
    for (const Open& o : stack) open_min = std::min(open_min, o.node.bound);
    if (prunable(open_min)) break;
    if (Clock::now() > deadline) {
      timed_out = true;
      break;
    }
    Open cur = std::move(stack.back());
    stack.pop_back();
    if (prunable(cur.node.bound)) continue;
    ++st.tree_nodes;
    eng.enter(cur.node);
    rmp.cuts().driver_fixed.assign(n, 0);
    for (int i = 0; i < n; ++i) rmp.cuts().driver_fixed[i] = cur.node.driver[i] == 1;
    CgOutcome out = column_generation(eng, rmp, cur.basis, cfg);
    if (out.kind == CgOutcome::Timeout) {
      stack.push_back(std::move(cur));
      timed_out = true;
      break;
    }
    settle(cur.node, out, cur.basis);
    if (opt.mip_every > 0 && st.tree_nodes % opt.mip_every == 0) run_pool_mip();
  }
  rmp.cuts().driver_fixed.assign(n, 0);
  if (stack.empty() && !timed_out) open_min = incumbent;
  else {
    open_min = std::numeric_limits<double>::infinity();
    for (const Open& o : stack) open_min = std::min(open_min, o.node.bound);
    if (!std::isfinite(open_min)) open_min = root_bound;
  }

  st.columns = static_cast<long>(rmp.size());
  st.pricing_calls = eng.pricing_calls();
  st.infeasible_candidates = eng.infeasible_candidates();
  st.labels = eng.labels();
  st.total_s = seconds_since(t0);

  if (!std::isfinite(incumbent)) {
    result.status = SolveStatus::NoSolution;
    result.bound = open_min;
    return result;
  }
  result.objective = incumbent;
  result.bound = std::min(open_min, incumbent);
  const bool proven = integral ? incumbent - result.bound < 1.0 : result.bound >= incumbent - 1e-9;
  result.status = proven ? SolveStatus::Optimal : SolveStatus::TimeLimit;
  result.gap = proven ? 0.0 : (incumbent - result.bound) / std::abs(incumbent);
  if (proven) result.bound = incumbent;
  result.plan = plan_of(inst, rmp, best_cols, incumbent, result.gap);
  return result;
}

ReaResult solve_rea(const Instance& inst, const ReaOptions& opt) {
  const auto t0 = Clock::now();
  ReaResult out;
  EnumerateOptions eo;
  eo.threads = opt.threads;
  const RoutePool pool = enumerate_routes(inst, eo);
  out.pool = pool.stats;
  out.enumerate_s = seconds_since(t0);
  const double cbar = opt.fixed_cost > 0
                          ? opt.fixed_cost
                          : lexicographic_fixed_cost(inst, pool, inst.params().fixed_cost_multiplier);
  const CostModel model{cbar, 1.0};
  Rmp rmp(inst, model, model);
  rmp.add_pool(pool);
  out.columns = static_cast<long>(rmp.size());
  const auto t1 = Clock::now();
  const RmpResult relaxed = rmp.solve({});
  const std::vector<int> warm = singleton_columns(rmp);
  const PoolMipResult m = mip_over_pool(rmp, opt.mip_budget_s, nullptr, &warm);
  out.mip_s = seconds_since(t1);

  SolveResult& r = out.result;
  r.stats.fixed_cost = cbar;
  r.stats.columns = out.columns;
  if (relaxed.status == lp::Status::Optimal) r.stats.root_lp = r.stats.root_lp_nocuts = relaxed.objective;
  r.stats.total_s = seconds_since(t0);
  if (!m.has_solution) {
    r.status = SolveStatus::NoSolution;
    r.bound = m.bound;
    return out;
  }
  r.objective = m.objective;
  r.bound = m.bound;
  r.gap = m.timed_out ? m.gap : 0.0;
  r.status = m.timed_out ? SolveStatus::TimeLimit : SolveStatus::Optimal;
  r.plan = plan_of(inst, rmp, m.selected, m.objective, r.gap);
  return out;
}

HeuristicResult root_heuristic(const Instance& inst, const HeuristicOptions& opt) {
  const auto t0 = Clock::now();
  HeuristicResult h;
  EnumerateOptions seed_opt;
  seed_opt.capacity = std::max(1, std::min(opt.seed_capacity, inst.capacity()));
  seed_opt.threads = opt.threads;
  const RoutePool seed = enumerate_routes(inst, seed_opt);
  const CostModel unit{1.0, 0.0};
  Rmp rmp(inst, unit, unit);
  rmp.add_pool(seed);

  Engine eng(inst, rmp, opt.preprocess, opt.rcsp, !opt.relax_forbidden, opt.threads);
  BranchNode root;
  root.driver.assign(inst.n(), -1);
  eng.enter(root);

  CgSettings cfg;
  cfg.tol = 1e-6;
  cfg.rule = StopRule::Converged;
  cfg.deadline = deadline_after(t0, opt.t_rmp_s);
  double best_farley = 0.0;
  cfg.on_round = [&](const RmpResult& r, const Engine::Round& round) {
    ++h.cg_iterations;
    h.z_rmp = r.objective;
    h.rc_star = std::min(0.0, std::isfinite(round.rc_star) ? round.rc_star : 0.0);
    h.farley = r.objective / (1.0 - h.rc_star);
    best_farley = std::max(best_farley, h.farley);
  };
  lp::Basis basis;
  const CgOutcome cg = column_generation(eng, rmp, basis, cfg);
  h.rmp_s = seconds_since(t0);
  h.converged = cg.kind == CgOutcome::Optimal && cg.converged;
  h.z_lb = h.converged ? cg.lp.objective : best_farley;
  if (h.converged) h.z_rmp = cg.lp.objective;

  const auto t1 = Clock::now();
  const std::vector<char>& usable = eng.column_feasible();
  const std::vector<int> warm = singleton_columns(rmp);
  const PoolMipResult m = mip_over_pool(rmp, opt.t_mip_s, &usable, &warm);
  h.mip_s = seconds_since(t1);
  h.columns = static_cast<long>(rmp.size());
  h.infeasible_columns = eng.infeasible_columns();
  h.total_s = seconds_since(t0);
  if (!m.has_solution) return h;
  h.z_mip = m.objective;
  h.gap = h.z_mip > 0 ? std::max(0.0, (h.z_mip - h.z_lb) / h.z_mip) : 0.0;
  h.status = h.gap <= 0.0 && !m.timed_out ? SolveStatus::Optimal : SolveStatus::TimeLimit;
  for (int id : m.selected)
    if (!usable[id]) throw Error("heuristic MIP selected an infeasible column");
  h.plan = plan_of(inst, rmp, m.selected, m.objective, h.gap);
  return h;
}

}  // namespace ctsp
