#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ctsp/model.hpp"

namespace ctsp {

struct PoolStats {
  // Indexed by rider count k (entry 0 unused).
  std::vector<long> candidates;  // (combination, driver) pairs searched
  std::vector<long> routes;      // routes stored
  double seconds = 0.0;
};

// Routes keyed by (direction, driver, rider set), sorted by direction, rider
// count, rider set and driver.
struct RoutePool {
  std::vector<Route> routes;
  PoolStats stats;

  std::size_t size() const { return routes.size(); }
  const Route* find(Direction dir, int driver, const std::vector<int>& riders) const;
  std::size_t count(Direction dir) const;
  Meters max_distance() const;
  void merge(RoutePool other);
};

struct EnumerateOptions {
  int capacity = 0;                // 0 = instance capacity
  bool keep_all_feasible = false;  // store every feasible ordering
  int threads = 1;
  std::vector<int> commuters;      // restrict to these commuters; empty = all
};

// Every valid stop sequence of the commuters in q (sorted ids) driven by
// `driver`, visited in lexicographic order.
void valid_orderings(const Network& net, std::span<const int> q, int driver, int capacity,
                     const std::function<void(const std::vector<int>&)>& visit);

// Minimum-distance feasible route of q with the given driver; ties go to the
// lexicographically smallest stop sequence.
std::optional<Route> best_route(const Network& net, std::span<const int> q, int driver,
                                int capacity);

RoutePool enumerate_routes(const Instance& inst, Direction dir, const EnumerateOptions& opt = {});
// Both directions, inbound first.
RoutePool enumerate_routes(const Instance& inst, const EnumerateOptions& opt = {});

// One JSON object per line: direction, driver, stops, riders, distance.
void write_pool_jsonl(const RoutePool& pool, std::ostream& os);

}  // namespace ctsp
