#include "ctsp/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <ostream>
#include <set>

#include "ctsp/parallel.hpp"
#include "ctsp/schedule.hpp"
#include "json.hpp"

namespace ctsp {

namespace {

constexpr Meters kNoBound = std::numeric_limits<Meters>::max();

// Depth-first generator of the valid stop sequences of one (q, driver).
// With `prune` set, prefixes that cannot meet a deadline or a ride limit
// (even without waiting) are cut, and so are prefixes whose distance bound
// reaches `bound`.
class OrderSearch {
 public:
  using Sink = std::function<void(const std::vector<int>&, Meters)>;

  OrderSearch(const Network& net, std::span<const int> q, int driver, int capacity, bool prune)
      : net_(net), q_(q.begin(), q.end()), driver_(driver), capacity_(capacity), prune_(prune) {
    const int m = static_cast<int>(q_.size());
    state_.assign(m, 0);
    wait_free_.assign(m, 0.0);
    for (int k = 0; k < m; ++k)
      if (q_[k] == driver_) driver_slot_ = k;
  }

  void set_bound(Meters b) { bound_ = b; }
  Meters bound() const { return bound_; }

  void run(const Sink& sink) {
    if (driver_slot_ < 0) return;
    sink_ = &sink;
    const int o = net_.origin_of(driver_);
    stops_.assign(1, o);
    state_[driver_slot_] = 1;
    wait_free_[driver_slot_] = 0.0;
    onboard_ = 1;
    picked_ = 1;
    extend(o, net_.node(o).window_start, 0);
  }

 private:
  bool can_reach(int from, Time t, int to, Time& arrive) const {
    arrive = t + net_.node(from).service + net_.tau(from, to);
    if (net_.is_origin(to)) arrive = std::max(arrive, net_.node(to).window_start);
    return arrive <= net_.node(to).window_end + kTimeEps;
  }

  // Every onboard rider can still be delivered from `at`.
  bool deliveries_possible(int at, Time t) const {
    const Time leave = net_.node(at).service;
    for (std::size_t k = 0; k < q_.size(); ++k) {
      if (state_[k] != 1) continue;
      const int o = net_.origin_of(q_[k]);
      const int d = net_.destination_of(q_[k]);
      const Time leg = leave + net_.tau(at, d);
      if (t + leg > net_.node(d).window_end + kTimeEps) return false;
      if (wait_free_[k] + leg - net_.node(o).service > net_.node(o).ride_limit + kTimeEps)
        return false;
    }
    return true;
  }

  void extend(int at, Time t, Meters dist) {
    const int m = static_cast<int>(q_.size());
    const int driver_dest = net_.destination_of(driver_);
    if (prune_) {
      if (!deliveries_possible(at, t)) return;
      if (bound_ != kNoBound && dist + net_.dist(at, driver_dest) >= bound_) return;
    }
    if (picked_ == m && onboard_ == 1) {
      Time arrive;
      const Meters total = dist + net_.dist(at, driver_dest);
      if (prune_ && !can_reach(at, t, driver_dest, arrive)) return;
      stops_.push_back(driver_dest);
      (*sink_)(stops_, total);
      stops_.pop_back();
      return;
    }
    // Candidates in increasing node id: origins first, then destinations.
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < m; ++k) {
        if (k == driver_slot_) continue;
        const bool pickup = pass == 0;
        if (pickup ? state_[k] != 0 : state_[k] != 1) continue;
        if (pickup && onboard_ + net_.node(net_.origin_of(q_[k])).demand > capacity_) continue;
        const int next = pickup ? net_.origin_of(q_[k]) : net_.destination_of(q_[k]);
        Time arrive;
        if (!can_reach(at, t, next, arrive) && prune_) continue;
        const Time leg = net_.node(at).service + net_.tau(at, next);
        std::vector<Time> saved = wait_free_;
        for (int r = 0; r < m; ++r)
          if (state_[r] == 1) wait_free_[r] += leg;
        if (pickup) {
          state_[k] = 1;
          wait_free_[k] = 0.0;
          onboard_ += net_.node(next).demand;
          ++picked_;
        } else {
          const int o = net_.origin_of(q_[k]);
          if (prune_ && wait_free_[k] - net_.node(o).service > net_.node(o).ride_limit + kTimeEps) {
            wait_free_ = std::move(saved);
            continue;
          }
          state_[k] = 2;
          onboard_ -= net_.node(o).demand;
        }
        stops_.push_back(next);
        extend(next, arrive, dist + net_.dist(at, next));
        stops_.pop_back();
        if (pickup) {
          state_[k] = 0;
          onboard_ -= net_.node(next).demand;
          --picked_;
        } else {
          state_[k] = 1;
          onboard_ += net_.node(net_.origin_of(q_[k])).demand;
        }
        wait_free_ = std::move(saved);
      }
    }
  }

  const Network& net_;
  std::vector<int> q_;
  int driver_;
  int capacity_;
  bool prune_;
  int driver_slot_ = -1;
  std::vector<int> state_;  // 0 waiting, 1 onboard, 2 delivered
  std::vector<Time> wait_free_;
  std::vector<int> stops_;
  int onboard_ = 0;
  int picked_ = 0;
  Meters bound_ = kNoBound;
  const Sink* sink_ = nullptr;
};

Route finish_route(const Network& net, const std::vector<int>& stops) {
  Route r = make_route(net, stops);
  if (auto s = feasible(net, r.stops)) r.schedule = s->service_start;
  return r;
}

struct DriverResult {
  std::vector<Route> routes;
  std::vector<long> candidates;
};

DriverResult enumerate_driver(const Network& net, int driver, const std::vector<int>& members,
                              int capacity, bool keep_all) {
  DriverResult out;
  out.candidates.assign(capacity + 1, 0);
  std::set<std::vector<int>> level{{driver}};

  auto search = [&](const std::vector<int>& q) -> bool {
    bool any = false;
    if (keep_all) {
      OrderSearch s(net, q, driver, capacity, true);
      s.run([&](const std::vector<int>& stops, Meters) {
        if (is_feasible(net, stops)) {
          out.routes.push_back(finish_route(net, stops));
          any = true;
        }
      });
      return any;
    }
    if (auto r = best_route(net, q, driver, capacity)) {
      out.routes.push_back(std::move(*r));
      any = true;
    }
    return any;
  };

  ++out.candidates[1];
  if (!search({driver})) return out;

  for (int k = 2; k <= capacity; ++k) {
    std::set<std::vector<int>> next;
    for (const std::vector<int>& base : level) {
      int top = -1;
      for (int c : base)
        if (c != driver) top = std::max(top, c);
      for (int j : members) {
        if (j == driver || j <= top) continue;
        std::vector<int> q = base;
        q.insert(std::upper_bound(q.begin(), q.end(), j), j);
        // Dropping any non-driver rider from a feasible route keeps it
        // feasible, so every such subset must already be feasible.
        bool hereditary = true;
        for (int i : q) {
          if (i == driver || i == j) continue;
          std::vector<int> sub;
          for (int c : q)
            if (c != i) sub.push_back(c);
          if (!level.count(sub)) {
            hereditary = false;
            break;
          }
        }
        if (!hereditary) continue;
        ++out.candidates[k];
        if (search(q)) next.insert(std::move(q));
      }
    }
    if (next.empty()) break;
    level = std::move(next);
  }
  return out;
}

bool route_order(const Route& a, const Route& b) {
  if (a.direction != b.direction) return a.direction < b.direction;
  if (a.riders.size() != b.riders.size()) return a.riders.size() < b.riders.size();
  if (a.riders != b.riders) return a.riders < b.riders;
  if (a.driver != b.driver) return a.driver < b.driver;
  return a.stops < b.stops;
}

}  // namespace

const Route* RoutePool::find(Direction dir, int driver, const std::vector<int>& riders) const {
  for (const Route& r : routes)
    if (r.direction == dir && r.driver == driver && r.riders == riders) return &r;
  return nullptr;
}

std::size_t RoutePool::count(Direction dir) const {
  return static_cast<std::size_t>(
      std::count_if(routes.begin(), routes.end(), [&](const Route& r) { return r.direction == dir; }));
}

Meters RoutePool::max_distance() const {
  Meters m = 0;
  for (const Route& r : routes) m = std::max(m, r.distance);
  return m;
}

void RoutePool::merge(RoutePool other) {
  for (Route& r : other.routes) routes.push_back(std::move(r));
  std::sort(routes.begin(), routes.end(), route_order);
  const std::size_t k = std::max(stats.candidates.size(), other.stats.candidates.size());
  stats.candidates.resize(k, 0);
  stats.routes.resize(k, 0);
  for (std::size_t i = 0; i < other.stats.candidates.size(); ++i) {
    stats.candidates[i] += other.stats.candidates[i];
    stats.routes[i] += other.stats.routes[i];
  }
  stats.seconds += other.stats.seconds;
}

void valid_orderings(const Network& net, std::span<const int> q, int driver, int capacity,
                     const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(q.size()) > capacity) return;
  OrderSearch s(net, q, driver, capacity, false);
  s.run([&](const std::vector<int>& stops, Meters) { visit(stops); });
}

std::optional<Route> best_route(const Network& net, std::span<const int> q, int driver,
                                int capacity) {
  if (static_cast<int>(q.size()) > capacity) return std::nullopt;
  OrderSearch s(net, q, driver, capacity, true);
  std::vector<int> best;
  s.run([&](const std::vector<int>& stops, Meters dist) {
    if (dist >= s.bound()) return;
    if (!is_feasible(net, stops)) return;
    best = stops;
    s.set_bound(dist);
  });
  if (best.empty()) return std::nullopt;
  return finish_route(net, best);
}

RoutePool enumerate_routes(const Instance& inst, Direction dir, const EnumerateOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const Network& net = inst.network(dir);
  const int capacity = opt.capacity > 0 ? opt.capacity : inst.capacity();
  std::vector<int> members = opt.commuters;
  if (members.empty())
    for (int i = 0; i < inst.n(); ++i) members.push_back(i);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (int c : members)
    if (c < 0 || c >= inst.n()) throw Error("enumerate: commuter id out of range");

  std::vector<DriverResult> results(members.size());
  parallel_for(members.size(), opt.threads, [&](std::size_t i) {
    results[i] = enumerate_driver(net, members[i], members, capacity, opt.keep_all_feasible);
  });

  RoutePool pool;
  pool.stats.candidates.assign(capacity + 1, 0);
  pool.stats.routes.assign(capacity + 1, 0);
  for (DriverResult& r : results) {
    for (int k = 1; k <= capacity; ++k) pool.stats.candidates[k] += r.candidates[k];
    for (Route& route : r.routes) {
      ++pool.stats.routes[route.riders.size()];
      pool.routes.push_back(std::move(route));
    }
  }
  std::sort(pool.routes.begin(), pool.routes.end(), route_order);
  pool.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pool;
}

RoutePool enumerate_routes(const Instance& inst, const EnumerateOptions& opt) {
  RoutePool pool = enumerate_routes(inst, Direction::Inbound, opt);
  pool.merge(enumerate_routes(inst, Direction::Outbound, opt));
  return pool;
}

void write_pool_jsonl(const RoutePool& pool, std::ostream& os) {
  for (const Route& r : pool.routes) {
    nlohmann::json j{{"direction", to_string(r.direction)},
                     {"driver", r.driver},
                     {"stops", r.stops},
                     {"riders", r.riders},
                     {"distance", r.distance}};
    os << j.dump() << '\n';
  }
}

}  // namespace ctsp
