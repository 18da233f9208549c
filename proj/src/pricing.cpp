#include "ctsp/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>

#include "ctsp/schedule.hpp"

namespace ctsp {

namespace {

constexpr double kCostEps = 1e-9;
constexpr Time kNoLowerBound = -std::numeric_limits<Time>::infinity();

}  // namespace

PricingGraph::PricingGraph(const Instance& inst, Direction dir, int driver,
                           const PreprocessOptions& opt)
    : inst_(&inst), net_(&inst.network(dir)), dir_(dir), driver_(driver), n_(inst.n()) {
  if (driver < 0 || driver >= n_) throw Error("pricing: driver out of range");
  nodes_ = net_->nodes();
  for (int i = n_; i < 2 * n_; ++i) nodes_[i].window_start = kNoLowerBound;
  const int m = size();
  edges_.assign(static_cast<std::size_t>(m) * m, 1);
  for (int i = 0; i < m; ++i) edges_[i * m + i] = 0;
  cost_.assign(static_cast<std::size_t>(m) * m, 0.0);
  if (opt.tighten) tighten_windows();
  if (opt.eliminate) eliminate_edges(opt.feasibility_probes);
}

std::size_t PricingGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(edges_.begin(), edges_.end(), 1));
}

const std::vector<int>& PricingGraph::successors(int i) const {
  if (!succ_valid_) {
    const int m = size();
    succ_.assign(m, {});
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (edges_[a * m + b]) succ_[a].push_back(b);
    succ_valid_ = true;
  }
  return succ_[i];
}

void PricingGraph::tighten_windows() {
  const int d = driver_;
  const int nd = n_ + d;
  for (int i = n_; i < 2 * n_; ++i) {
    if (i == nd) continue;
    nodes_[i].window_end = std::min(nodes_[i].window_end,
                                    nodes_[nd].window_end - nodes_[i].service - tau(i, nd));
  }
  for (int i = 0; i < n_; ++i) {
    if (i == d) continue;
    nodes_[i].window_end = std::min(
        nodes_[i].window_end, nodes_[n_ + i].window_end - nodes_[i].service - tau(i, n_ + i));
  }
  for (int i = 0; i < n_; ++i) {
    if (i == d) continue;
    nodes_[i].window_start = std::max(nodes_[i].window_start,
                                      nodes_[d].window_start + nodes_[d].service + tau(d, i));
  }
  for (int i = n_; i < 2 * n_; ++i) {
    if (i == nd) continue;
    const int o = i - n_;
    nodes_[i].window_start = std::max(nodes_[i].window_start,
                                      nodes_[o].window_start + nodes_[o].service + tau(o, i));
  }
}

void PricingGraph::eliminate_edges(bool feasibility_probes) {
  const int n = n_;
  const int d = driver_;
  const int nd = n + d;
  const int K = inst_->capacity();
  auto cut = [&](int i, int j) {
    if (i != j) remove_edge(i, j);
  };

  // Nodes whose tightened window is empty cannot be visited.
  for (int i = 0; i < 2 * n; ++i) {
    if (i == d || i == nd) continue;
    if (nodes_[i].window_start > nodes_[i].window_end + kTimeEps)
      for (int j = 0; j < 2 * n; ++j) {
        cut(i, j);
        cut(j, i);
      }
  }
  for (int i = 0; i < n; ++i) {
    // (a) driver
    if (i != d) {
      cut(d, n + i);
      cut(i, d);
      cut(i, nd);
      cut(n + i, d);
      cut(nd, i);
      cut(nd, n + i);
    }
    // (b) pairing and precedence
    cut(n + i, i);
  }
  // (c) capacity
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || nodes_[i].demand + nodes_[j].demand <= K) continue;
      cut(i, j);
      cut(j, i);
      cut(i, n + j);
      cut(j, n + i);
      cut(n + i, n + j);
      cut(n + j, n + i);
    }
  // (d) time windows
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      if (i == j || !has_edge(i, j)) continue;
      if (nodes_[i].window_start + nodes_[i].service + tau(i, j) > nodes_[j].window_end + kTimeEps)
        cut(i, j);
    }
  // (e) ride-duration limits
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      if (j == i || j == n + i) continue;
      if (tau(i, j) + nodes_[j].service + tau(j, n + i) > nodes_[i].ride_limit + kTimeEps) {
        cut(i, j);
        cut(j, n + i);
      }
    }
  if (!feasibility_probes) return;
  // (f) four-stop feasibility probes on the tightened windows
  const Network probe(dir_, nodes_, inst_->travel_ptr());
  auto ok = [&](int a, int b, int c, int e) {
    const int stops[4] = {a, b, c, e};
    return is_feasible(probe, stops);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (has_edge(i, n + j) && !ok(j, i, n + j, n + i)) cut(i, n + j);
      if (has_edge(n + i, j) && !ok(i, n + i, j, n + j)) cut(n + i, j);
      if (has_edge(i, j) && !ok(i, j, n + i, n + j) && !ok(i, j, n + j, n + i)) cut(i, j);
      if (has_edge(n + i, n + j) && !ok(i, j, n + i, n + j) && !ok(j, i, n + i, n + j))
        cut(n + i, n + j);
    }
}

void PricingGraph::set_costs(const PricingCosts& c) {
  const int m = size();
  const int d = driver_;
  const Duals& y = c.duals;
  const bool in = dir_ == Direction::Inbound;
  const std::vector<double>& pi = in ? y.pi_in : y.pi_out;
  distance_weight_ = c.objective.per_meter - y.nu * c.cut_row.per_meter;
  const double driver_term = c.objective.fixed - y.nu * c.cut_row.fixed - pi[d] -
                             (in ? 1.0 : -1.0) * y.sigma[d] - y.mu - (in ? y.phi[d] : 0.0);
  for (int i = 0; i < m; ++i) {
    double tail = 0.0;
    if (i == d) tail = driver_term;
    else if (i < n_) tail = -pi[i];
    for (int j = 0; j < m; ++j)
      cost_[i * m + j] = distance_weight_ * static_cast<double>(dist(i, j)) + tail;
  }
}

double PricingGraph::path_cost(const std::vector<int>& stops) const {
  double c = 0.0;
  for (std::size_t k = 1; k < stops.size(); ++k) c += cost(stops[k - 1], stops[k]);
  return c;
}

void PricingGraph::dump(std::ostream& os) const {
  os << "# driver " << driver_ << ' ' << to_string(dir_) << " nodes " << size() << '\n';
  const int m = size();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (has_edge(i, j))
        os << i << ' ' << j << ' ' << tau(i, j) << ' ' << dist(i, j) << ' ' << cost(i, j) << '\n';
}

bool Label::is_onboard(int rider) const {
  for (int k = 0; k < picked; ++k)
    if (riders[k] == rider) return (onboard >> k) & 1u;
  return false;
}

namespace {

int slot_of(const Label& l, int rider) {
  for (int k = 0; k < l.picked; ++k)
    if (l.riders[k] == rider) return k;
  return -1;
}

// Wait-free delivery probe: from the label's node visit `drops` (destination
// nodes) and then the driver's destination, checking deadlines and the ride
// limits of the riders delivered on the way.
bool probe_delivery(const Label& l, const PricingGraph& g, std::initializer_list<int> drops) {
  const int n = g.n();
  const int d = g.driver();
  int at = l.node;
  Time t = l.t;
  Time travelled = 0.0;
  auto visit = [&](int next, int rider) {
    const Time leg = g.node(at).service + g.tau(at, next);
    t += leg;
    travelled += leg;
    at = next;
    if (t > g.node(next).window_end + kTimeEps) return false;
    const int k = slot_of(l, rider);
    const Location& o = g.node(rider);
    return l.wait_free[k] + travelled - o.service <= o.ride_limit + kTimeEps;
  };
  for (int dest : drops)
    if (!visit(dest, dest - n)) return false;
  return visit(n + d, d);
}

bool extend(const Label& l, int j, const PricingGraph& g, int capacity, Label& out) {
  const int n = g.n();
  const int d = g.driver();
  const Location& from = g.node(l.node);
  const Location& to = g.node(j);
  const Time leg = from.service + g.tau(l.node, j);
  Time t = l.t + leg;
  const bool origin = j < n;
  if (origin) t = std::max(t, to.window_start);
  if (t > to.window_end + kTimeEps) return false;

  out.cost = l.cost + g.cost(l.node, j);
  out.t = t;
  out.node = j;
  out.depth = l.depth + 1;
  out.load = l.load;
  out.picked = l.picked;
  out.onboard = l.onboard;
  out.dead = false;
  for (int k = 0; k < l.picked; ++k) {
    out.riders[k] = l.riders[k];
    out.wait_free[k] = l.wait_free[k] + (((l.onboard >> k) & 1u) ? leg : 0.0);
  }
  if (origin) {
    int k = slot_of(l, j);
    if (k >= 0 && ((l.onboard >> k) & 1u)) return false;
    if (k < 0) {
      if (out.picked >= capacity) return false;
      k = out.picked++;
      out.riders[k] = j;
      out.wait_free[k] = 0.0;
    }
    out.load += to.demand;
    if (out.load > capacity) return false;
    out.onboard |= 1u << k;
  } else {
    const int rider = j - n;
    const int k = slot_of(l, rider);
    if (k < 0 || !((l.onboard >> k) & 1u)) return false;
    if (rider == d && l.onboard != (1u << slot_of(l, d))) return false;
    out.onboard &= ~(1u << k);
    out.load -= g.node(rider).demand;
  }
  for (int k = 0; k < l.picked; ++k) {
    if (!((l.onboard >> k) & 1u)) continue;
    const Location& o = g.node(l.riders[k]);
    if (out.wait_free[k] - o.service > o.ride_limit + kTimeEps) return false;
  }
  return true;
}

std::vector<int> path_of(const std::vector<Label>& arena, int id) {
  std::vector<int> p;
  for (int cur = id; cur >= 0; cur = arena[cur].parent) p.push_back(arena[cur].node);
  std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace

bool post_feasibility_prune(const Label& l, const PricingGraph& g) {
  const int n = g.n();
  const int d = g.driver();
  int onboard[kMaxPricingCapacity];
  int count = 0;
  for (int k = 0; k < l.picked; ++k)
    if (((l.onboard >> k) & 1u) && l.riders[k] != d) onboard[count++] = l.riders[k];
  for (int a = 0; a < count; ++a)
    if (!probe_delivery(l, g, {n + onboard[a]})) return false;
  for (int a = 0; a < count; ++a)
    for (int b = a + 1; b < count; ++b)
      if (!probe_delivery(l, g, {n + onboard[a], n + onboard[b]}) &&
          !probe_delivery(l, g, {n + onboard[b], n + onboard[a]}))
        return false;
  return true;
}

bool dominates(const Label& a, const Label& b, const PricingGraph& g) {
  if (a.node != b.node) return false;
  if (a.cost > b.cost + kCostEps) return false;
  if (a.t > b.t + kTimeEps) return false;
  if (a.picked > b.picked) return false;
  const bool exact_onboard = g.distance_weight() < 0.0;
  for (int k = 0; k < a.picked; ++k) {
    const int r = a.riders[k];
    const int kb = slot_of(b, r);
    const bool in_a = (a.onboard >> k) & 1u;
    if (in_a) {
      if (kb < 0 || !((b.onboard >> kb) & 1u)) return false;
      if (a.wait_free[k] > b.wait_free[kb] + kTimeEps) return false;
    } else if (kb < 0) {
      // Picked by a but not by b: b must be unable to reach it in time.
      const Time arrive = b.t + g.node(b.node).service + g.tau(b.node, r);
      if (arrive <= g.node(r).window_end + kTimeEps) return false;
    }
  }
  if (exact_onboard) {
    for (int k = 0; k < b.picked; ++k)
      if (((b.onboard >> k) & 1u) && !a.is_onboard(b.riders[k])) return false;
  }
  for (int f : a.matching)
    if (std::find(b.matching.begin(), b.matching.end(), f) == b.matching.end() ||
        a.depth > b.depth)
      return false;
  return true;
}

std::optional<PricedRoute> rcsp_min_path(const PricingGraph& g, int capacity,
                                         const RcspOptions& opt, RcspStats* stats) {
  if (capacity > kMaxPricingCapacity)
    throw Error("pricing supports capacities up to " + std::to_string(kMaxPricingCapacity));
  const int n = g.n();
  const int d = g.driver();
  const int target = n + d;
  const auto& forbidden = g.forbidden();

  std::vector<Label> arena;
  std::vector<std::vector<int>> bucket(g.size());
  Label init;
  init.node = d;
  init.t = g.node(d).window_start;
  init.picked = 1;
  init.riders[0] = d;
  init.load = g.node(d).demand;
  init.onboard = 1u;
  if (init.t > g.node(d).window_end + kTimeEps) return std::nullopt;
  arena.push_back(init);
  bucket[d].push_back(0);

  using Entry = std::tuple<Time, double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  heap.emplace(init.t, init.cost, 0);
  long created = 1;

  while (!heap.empty()) {
    const int id = std::get<2>(heap.top());
    heap.pop();
    if (arena[id].dead || arena[id].node == target) continue;
    const Label cur = arena[id];
    for (int j : g.successors(cur.node)) {
      Label next;
      if (!extend(cur, j, g, capacity, next)) continue;
      next.parent = id;
      bool blocked = false;
      if (cur.depth == 0) {
        for (int f = 0; f < static_cast<int>(forbidden.size()); ++f) {
          const auto& p = forbidden[f];
          if (p.size() < 2 || p[0] != d || p[1] != j) continue;
          if (p.size() == 2) blocked = true;
          else next.matching.push_back(f);
        }
      } else {
        for (int f : cur.matching) {
          const auto& p = forbidden[f];
          if (static_cast<int>(p.size()) <= next.depth || p[next.depth] != j) continue;
          if (static_cast<int>(p.size()) == next.depth + 1) blocked = true;
          else next.matching.push_back(f);
        }
      }
      if (blocked) continue;
      if (opt.post_prune && j != target && !post_feasibility_prune(next, g)) {
        if (stats) ++stats->pruned;
        continue;
      }
      if (opt.dominance) {
        bool beaten = false;
        for (int other : bucket[j])
          if (!arena[other].dead && dominates(arena[other], next, g)) {
            beaten = true;
            break;
          }
        if (beaten) {
          if (stats) ++stats->dominated;
          continue;
        }
        auto& b = bucket[j];
        for (int other : b)
          if (dominates(next, arena[other], g)) {
            arena[other].dead = true;
            if (stats) ++stats->dominated;
          }
        b.erase(std::remove_if(b.begin(), b.end(), [&](int o) { return arena[o].dead; }), b.end());
      }
      const int nid = static_cast<int>(arena.size());
      arena.push_back(std::move(next));
      bucket[j].push_back(nid);
      heap.emplace(arena[nid].t, arena[nid].cost, nid);
      ++created;
      if (opt.label_limit > 0 && created > opt.label_limit)
        throw Error("pricing: label limit exceeded");
    }
  }
  if (stats) stats->labels += created;

  int best = -1;
  std::vector<int> best_path;
  for (int id : bucket[target]) {
    const Label& l = arena[id];
    if (l.dead) continue;
    if (best >= 0 && l.cost > arena[best].cost + kCostEps) continue;
    std::vector<int> p = path_of(arena, id);
    if (best >= 0 && l.cost >= arena[best].cost - kCostEps && p >= best_path) continue;
    best = id;
    best_path = std::move(p);
  }
  if (best < 0) return std::nullopt;
  PricedRoute pr;
  pr.route = make_route(g.network(), best_path);
  pr.reduced_cost = arena[best].cost;
  return pr;
}

std::optional<PricedRoute> price_driver(PricingGraph& g, const PriceOptions& opt,
                                        RcspStats* stats) {
  const Instance& inst = g.instance();
  const Network& net = g.network();
  for (int round = 1; round <= opt.max_rounds; ++round) {
    auto cand = rcsp_min_path(g, inst.capacity(), opt.rcsp, stats);
    if (!cand) return std::nullopt;
    cand->rounds = round;
    const std::vector<int>& stops = cand->route.stops;
    std::optional<Schedule> sched;
    if (is_valid(net, stops, inst.capacity(), g.driver())) sched = feasible(net, stops);
    if (sched) {
      cand->route.schedule = sched->service_start;
      return cand;
    }
    cand->feasible = false;
    if (!opt.forbid_infeasible) return cand;
    for (const auto& f : g.forbidden())
      if (f == stops) throw Error("pricing: a forbidden path was generated again");
    g.forbid(stops);
  }
  throw Error("pricing: forbidden-path loop did not settle");
}

}  // namespace ctsp
