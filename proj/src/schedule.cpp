#include "ctsp/schedule.hpp"

#include <algorithm>
#include <limits>

namespace ctsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Difference constraint T[to] - T[from] <= weight.
struct Arc {
  int from;
  int to;
  double weight;
};

struct ConstraintGraph {
  int vertices = 0;  // stops plus the zero vertex (last index)
  std::vector<Arc> arcs;
};

// Earliest-time sweep without optional waiting. Fails fast on deadlines and
// on wait-free ride durations; both are necessary for feasibility.
bool quick_reject(const Network& net, std::span<const int> stops) {
  const std::size_t m = stops.size();
  Time t = net.node(stops[0]).window_start;
  for (std::size_t k = 1; k < m; ++k) {
    const Location& prev = net.node(stops[k - 1]);
    const Location& cur = net.node(stops[k]);
    t += prev.service + net.tau(stops[k - 1], stops[k]);
    if (net.is_origin(stops[k])) t = std::max(t, cur.window_start);
    if (t > cur.window_end + kTimeEps) return true;
  }
  return false;
}

ConstraintGraph build_constraints(const Network& net, std::span<const int> stops) {
  const int m = static_cast<int>(stops.size());
  const int zero = m;
  ConstraintGraph g;
  g.vertices = m + 1;
  g.arcs.reserve(6 * m);
  for (int k = 0; k < m; ++k) {
    const Location& loc = net.node(stops[k]);
    g.arcs.push_back({zero, k, loc.window_end});
    if (net.is_origin(stops[k])) g.arcs.push_back({k, zero, -loc.window_start});
    if (k > 0) {
      const Location& prev = net.node(stops[k - 1]);
      const double gap = prev.service + net.tau(stops[k - 1], stops[k]);
      g.arcs.push_back({k, k - 1, -gap});
      if (!net.is_origin(stops[k])) g.arcs.push_back({k - 1, k, gap});
    }
  }
  // Ride limits between each pickup and its drop-off.
  for (int p = 0; p < m; ++p) {
    if (!net.is_origin(stops[p])) continue;
    const int dest = net.destination_of(stops[p]);
    for (int q = p + 1; q < m; ++q) {
      if (stops[q] == dest) {
        const Location& o = net.node(stops[p]);
        g.arcs.push_back({p, q, o.ride_limit + o.service});
        break;
      }
    }
  }
  return g;
}

// Bellman-Ford shortest distances from `source`; false on a negative cycle.
bool shortest_from(const ConstraintGraph& g, int source, std::vector<double>& dist) {
  dist.assign(g.vertices, kInf);
  dist[source] = 0.0;
  for (int pass = 0; pass < g.vertices; ++pass) {
    bool changed = false;
    for (const Arc& a : g.arcs) {
      if (dist[a.from] == kInf) continue;
      const double cand = dist[a.from] + a.weight;
      if (cand < dist[a.to] - kTimeEps) {
        dist[a.to] = cand;
        changed = true;
      }
    }
    if (!changed) return true;
  }
  return false;
}

}  // namespace

bool is_valid(const Network& net, std::span<const int> stops, int capacity, int driver) {
  const int n = net.n();
  if (stops.size() < 2) return false;
  const int first = stops.front();
  if (first < 0 || first >= n) return false;
  if (driver >= 0 && first != driver) return false;
  if (stops.back() != n + first) return false;

  std::vector<char> seen(2 * n, 0);
  int load = 0;
  int riders = 0;
  for (int s : stops) {
    if (s < 0 || s >= 2 * n || seen[s]) return false;
    seen[s] = 1;
    if (s < n) {
      load += net.node(s).demand;
      ++riders;
      if (load > capacity) return false;
    } else {
      if (!seen[s - n]) return false;  // drop-off before pickup
      load -= net.node(s - n).demand;
    }
  }
  for (int c = 0; c < n; ++c)
    if (seen[c] != seen[n + c]) return false;
  return riders <= capacity;
}

bool is_valid(const Route& route, const Network& net, int capacity) {
  if (route.direction != net.direction()) return false;
  return is_valid(net, route.stops, capacity, route.driver);
}

bool is_feasible(const Network& net, std::span<const int> stops) {
  if (stops.size() < 2) return false;
  if (quick_reject(net, stops)) return false;
  const ConstraintGraph g = build_constraints(net, stops);
  thread_local std::vector<double> dist;
  return shortest_from(g, g.vertices - 1, dist);
}

std::optional<Schedule> feasible(const Network& net, std::span<const int> stops) {
  if (stops.size() < 2) return std::nullopt;
  if (quick_reject(net, stops)) return std::nullopt;
  ConstraintGraph g = build_constraints(net, stops);
  const int m = static_cast<int>(stops.size());
  const int zero = m;
  std::vector<double> dist;
  if (!shortest_from(g, zero, dist)) return std::nullopt;

  // max(T_first - T_last) is the shortest distance last -> first.
  std::vector<double> from_last;
  shortest_from(g, m - 1, from_last);
  const double min_duration = -from_last[0];

  // Pin the optimal duration; the shortest-path potentials from the zero
  // vertex are then the latest schedule achieving it.
  g.arcs.push_back({0, m - 1, min_duration});
  if (!shortest_from(g, zero, dist)) return std::nullopt;

  Schedule s;
  s.service_start.resize(m);
  for (int k = 0; k < m; ++k) s.service_start[k] = dist[k];
  s.duration = s.service_start[m - 1] - s.service_start[0];
  for (int p = 0; p < m; ++p) {
    if (!net.is_origin(stops[p])) continue;
    const int dest = net.destination_of(stops[p]);
    for (int q = p + 1; q < m; ++q) {
      if (stops[q] == dest) {
        s.rides.emplace_back(stops[p], s.service_start[q] - s.service_start[p] -
                                           net.node(stops[p]).service);
        break;
      }
    }
  }
  return s;
}

std::optional<Schedule> feasible(const Route& route, const Instance& inst) {
  return feasible(inst.network(route.direction), route.stops);
}

}  // namespace ctsp
