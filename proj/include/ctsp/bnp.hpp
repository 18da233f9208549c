#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ctsp/master.hpp"
#include "ctsp/pricing.hpp"

namespace ctsp {

// Fixing of the flow on one edge of one direction.
struct EdgeFixing {
  Direction direction = Direction::Inbound;
  int from = 0;
  int to = 0;
  bool value = false;
  auto operator<=>(const EdgeFixing&) const = default;
};

struct BranchNode {
  std::vector<signed char> driver;  // per commuter: -1 free, 0 or 1 fixed
  std::vector<EdgeFixing> edges;
  double bound = -std::numeric_limits<double>::infinity();  // parent's z*
  int depth = 0;
};

// Commuters that cannot drive under a node's fixings, including those an
// edge fixed to 1 rules out (an origin with a fixed predecessor, a
// destination with a fixed successor).
std::vector<char> banned_drivers(const BranchNode& node, int n);

// Whether a route respects every fixing of the node.
bool column_allowed(const Route& route, const BranchNode& node, const std::vector<char>& banned);

// Children of a fractional node, in exploration order. Empty when every
// driver variable and edge flow is integral. `x` is indexed by column id.
std::vector<BranchNode> branch(const Rmp& rmp, const std::vector<double>& x,
                               const BranchNode& node, double tol = 1e-6);

// Values of V_i (inbound routes driven by i) and of the aggregated edge
// flows per direction.
std::vector<double> driver_values(const Rmp& rmp, const std::vector<double>& x);
std::vector<std::pair<std::pair<int, int>, double>> edge_flows(const Rmp& rmp,
                                                               const std::vector<double>& x,
                                                               Direction dir);

struct BpaOptions {
  double time_limit_s = std::numeric_limits<double>::infinity();
  int threads = 1;
  double fixed_cost = 0.0;  // 0: derived from the seed pool and the plan bound
  bool use_cuts = true;
  int seed_capacity = 2;    // routes of up to this many commuters seed the RMP
  long mip_every = 1000;    // tree nodes between pool MIP solves
  double mip_budget_s = 30.0;
  PreprocessOptions preprocess;
  RcspOptions rcsp;
  std::function<void(const std::string&)> log;
};

struct BpaStats {
  long tree_nodes = 0;
  long columns = 0;
  long seed_columns = 0;
  long inbound_edges = 0;
  long outbound_edges = 0;
  long cg_iterations = 0;
  long pricing_calls = 0;
  long infeasible_candidates = 0;
  long labels = 0;
  double root_lp = 0.0;        // converged root z* after the cuts
  double root_lp_nocuts = 0.0;  // root bound before any cut (z* when converged)
  double fixed_cost = 0.0;
  double rmp_convergence_s = 0.0;
  double root_solution_s = 0.0;
  double best_solution_s = 0.0;
  double total_s = 0.0;
};

enum class SolveStatus { Optimal, TimeLimit, NoSolution };
const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::NoSolution;
  Plan plan;
  double objective = 0.0;  // incumbent objective
  double bound = 0.0;      // proven lower bound
  double gap = 0.0;
  BpaStats stats;
};

SolveResult solve_bpa(const Instance& inst, const BpaOptions& opt = {});

struct ReaOptions {
  int threads = 1;
  double fixed_cost = 0.0;  // 0: derived from the pool and the plan bound
  double mip_budget_s = std::numeric_limits<double>::infinity();
};

struct ReaResult {
  SolveResult result;
  PoolStats pool;
  long columns = 0;
  double enumerate_s = 0.0;
  double mip_s = 0.0;
};

// Enumerate every best route and solve the set-partitioning MIP over them.
ReaResult solve_rea(const Instance& inst, const ReaOptions& opt = {});

// Fixed cost that keeps vehicle count strictly ahead of distance.
double lexicographic_fixed_cost(const Instance& inst, const RoutePool& pool, double multiplier);

struct HeuristicOptions {
  double t_rmp_s = 480.0;
  double t_mip_s = 120.0;
  bool relax_forbidden = false;
  int threads = 1;
  int seed_capacity = 2;
  PreprocessOptions preprocess;
  RcspOptions rcsp;
};

struct HeuristicResult {
  SolveStatus status = SolveStatus::NoSolution;
  Plan plan;
  double z_mip = 0.0;
  double z_rmp = 0.0;  // last RMP objective
  double z_lb = 0.0;
  double rc_star = 0.0;  // last pricing round
  bool converged = false;
  double farley = 0.0;  // Farley bound from the last pricing round
  double gap = 0.0;
  long columns = 0;
  long infeasible_columns = 0;
  long cg_iterations = 0;
  double rmp_s = 0.0;
  double mip_s = 0.0;
  double total_s = 0.0;
};

// Column generation at the root under unit route costs within t_rmp, then
// the pool MIP within t_mip.
HeuristicResult root_heuristic(const Instance& inst, const HeuristicOptions& opt = {});

}  // namespace ctsp
