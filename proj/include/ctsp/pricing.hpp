#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ctsp/master.hpp"
#include "ctsp/model.hpp"

namespace ctsp {

inline constexpr int kMaxPricingCapacity = 8;

struct PreprocessOptions {
  bool tighten = true;
  bool eliminate = true;      // rules (a) through (e)
  bool feasibility_probes = true;  // rule (f)
};

// Edge costs are derived from the route cost model and the RMP duals. For
// Farkas pricing pass a zero objective model and the Farkas multipliers.
struct PricingCosts {
  CostModel objective;
  CostModel cut_row;
  Duals duals;
};

// Per-driver pricing graph over the 2n nodes of one direction.
class PricingGraph {
 public:
  PricingGraph(const Instance& inst, Direction dir, int driver,
               const PreprocessOptions& opt = {});

  Direction direction() const { return dir_; }
  int driver() const { return driver_; }
  int n() const { return n_; }
  int size() const { return 2 * n_; }
  const Network& network() const { return *net_; }
  const Instance& instance() const { return *inst_; }

  // Node data after tightening. Destination window starts are the derived
  // earliest arrivals (the route schedule never bounds destinations below).
  const Location& node(int i) const { return nodes_[i]; }
  Time tau(int i, int j) const { return net_->tau(i, j); }
  Meters dist(int i, int j) const { return net_->dist(i, j); }

  bool has_edge(int i, int j) const { return edges_[i * size() + j] != 0; }
  void remove_edge(int i, int j) {
    edges_[i * size() + j] = 0;
    succ_valid_ = false;
  }
  std::size_t edge_count() const;
  const std::vector<int>& successors(int i) const;

  void tighten_windows();
  void eliminate_edges(bool feasibility_probes = true);

  void set_costs(const PricingCosts& costs);
  double cost(int i, int j) const { return cost_[i * size() + j]; }
  double path_cost(const std::vector<int>& stops) const;
  // Per-meter coefficient of the current edge costs.
  double distance_weight() const { return distance_weight_; }

  const std::vector<std::vector<int>>& forbidden() const { return forbidden_; }
  void forbid(std::vector<int> path) { forbidden_.push_back(std::move(path)); }

  // Edge list: "i j tau dist cost" per surviving edge.
  void dump(std::ostream& os) const;

 private:
  const Instance* inst_;
  const Network* net_;
  Direction dir_;
  int driver_;
  int n_;
  std::vector<Location> nodes_;
  std::vector<char> edges_;
  std::vector<double> cost_;
  double distance_weight_ = 1.0;
  mutable std::vector<std::vector<int>> succ_;
  mutable bool succ_valid_ = false;
  std::vector<std::vector<int>> forbidden_;
};

struct Label {
  double cost = 0.0;
  Time t = 0.0;
  int node = 0;
  int parent = -1;
  int depth = 0;  // edges on the path
  int load = 0;
  int picked = 0;  // |R|, driver included
  int riders[kMaxPricingCapacity] = {};
  Time wait_free[kMaxPricingCapacity] = {};
  unsigned onboard = 0;  // bit k: riders[k] is in the vehicle
  std::vector<int> matching;  // forbidden paths equal to this path's prefix
  bool dead = false;

  bool is_onboard(int rider) const;
};

struct RcspOptions {
  bool dominance = true;
  bool post_prune = true;
  long label_limit = 0;  // 0 = unlimited
};

struct RcspStats {
  long labels = 0;
  long dominated = 0;
  long pruned = 0;
};

struct PricedRoute {
  Route route;
  double reduced_cost = 0.0;
  bool feasible = true;  // schedule verified with waits
  int rounds = 1;        // RCSPA runs, forbidden-path retries included
};

// Labels a and b at the same node: a dominates b.
bool dominates(const Label& a, const Label& b, const PricingGraph& g);

// Keep a label only if every onboard rider can still be delivered, alone
// and pairwise, ignoring waits.
bool post_feasibility_prune(const Label& label, const PricingGraph& g);

// Least-cost wait-relaxed path from d to n + d (not yet checked with waits).
std::optional<PricedRoute> rcsp_min_path(const PricingGraph& g, int capacity,
                                         const RcspOptions& opt = {}, RcspStats* stats = nullptr);

struct PriceOptions {
  RcspOptions rcsp;
  bool forbid_infeasible = true;  // false: return wait-infeasible candidates as is
  int max_rounds = 10000;
};

// RCSPA with the forbidden-path loop: infeasible candidates join the
// graph's forbidden set and the search repeats.
std::optional<PricedRoute> price_driver(PricingGraph& g, const PriceOptions& opt = {},
                                        RcspStats* stats = nullptr);

}  // namespace ctsp
