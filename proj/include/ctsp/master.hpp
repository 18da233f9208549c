#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "ctsp/enumerate.hpp"
#include "ctsp/lp.hpp"
#include "ctsp/model.hpp"

namespace ctsp {

// Route cost as an affine function of its distance.
struct CostModel {
  double fixed = 0.0;
  double per_meter = 1.0;
  double operator()(Meters d) const { return fixed + per_meter * static_cast<double>(d); }
};

// c-bar: M times the largest route distance in the pool.
double fixed_cost(const RoutePool& pool, double multiplier);
// Before enumeration: M * max(n, 2 min(n, K) - 1) * (largest distance entry),
// the second factor covering routes whose every leg is the longest entry.
double fixed_cost_bound(const Instance& inst, double multiplier);
// Largest total distance any plan can have: 2n routes of at most 2K - 1 legs.
double plan_distance_bound(const Instance& inst);

struct Column {
  Route route;
  double cost = 0.0;      // objective coefficient
  double cut_coeff = 0.0;  // coefficient in the objective-cut row
};

// Row duals grouped by constraint family.
struct Duals {
  std::vector<double> pi_in;   // inbound coverage
  std::vector<double> pi_out;  // outbound coverage
  std::vector<double> sigma;   // driver balance
  double mu = 0.0;             // parity cut
  double nu = 0.0;             // objective cut
  std::vector<double> phi;     // driver-selection cuts
};

struct RmpCuts {
  double parity_rhs = 0.0;
  double objective_rhs = 0.0;
  std::vector<char> driver_fixed;  // row becomes "= 1" when set
};

struct RmpResult {
  lp::Status status = lp::Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // per column id; zero for masked columns
  Duals duals;            // Farkas multipliers when infeasible
  lp::Basis basis;        // structural entries are column ids
  int iterations = 0;
};

// Restricted master problem. Rows, in order: inbound coverage (n, = 1),
// outbound coverage (n, = 1), driver balance (n, = 0), parity cut (>=),
// objective cut (>=), driver-selection cuts (n, >= 0 or = 1).
class Rmp {
 public:
  Rmp(const Instance& inst, CostModel objective, CostModel cut_row);

  const Instance& instance() const { return *inst_; }
  int n() const { return inst_->n(); }
  const CostModel& objective_model() const { return objective_; }
  const CostModel& cut_model() const { return cut_; }

  // Adds a route as a column; -1 when an identical column exists.
  int add(Route route);
  int add_pool(const RoutePool& pool);
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }

  RmpCuts& cuts() { return cuts_; }
  const RmpCuts& cuts() const { return cuts_; }

  int num_rows() const { return 4 * n() + 2; }
  int row_inbound(int i) const { return i; }
  int row_outbound(int i) const { return n() + i; }
  int row_balance(int i) const { return 2 * n() + i; }
  int row_parity() const { return 3 * n(); }
  int row_objective() const { return 3 * n() + 1; }
  int row_driver(int i) const { return 3 * n() + 2 + i; }

  // LP over the active columns (mask entries beyond its size count as
  // active). var_to_col receives the column id of each LP variable.
  lp::LinearProgram build(const std::vector<char>& active, std::vector<int>& var_to_col,
                          bool with_cuts = true) const;

  // Column coefficients as (row, value) pairs.
  std::vector<std::pair<int, double>> coefficients(const Column& c) const;

  RmpResult solve(const std::vector<char>& active, const lp::Basis* warm = nullptr,
                  const lp::SolverOptions& opt = {}) const;

  Duals split(const std::vector<double>& rows) const;

  // c_r - sum of row duals times coefficients. With `farkas`, the column
  // cost is taken as zero.
  double reduced_cost(const Column& c, const Duals& d, bool farkas = false) const;

 private:
  const Instance* inst_;
  CostModel objective_;
  CostModel cut_;
  std::vector<Column> columns_;
  std::map<std::tuple<int, int, std::vector<int>>, int> index_;
  RmpCuts cuts_;
};

struct PoolMipResult {
  bool has_solution = false;
  std::vector<int> selected;  // column ids
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  bool timed_out = false;
};

// Set partitioning over the pool (coverage and driver balance only). Columns
// with usable[id] == 0 are left out.
PoolMipResult mip_over_pool(const Rmp& rmp, double time_budget_s,
                            const std::vector<char>* usable = nullptr,
                            const std::vector<int>* warm_columns = nullptr);

struct Plan {
  std::vector<Route> routes;
  int vehicle_count = 0;
  Meters total_distance = 0;
  double objective = 0.0;
  double gap = 0.0;
};

// Schedules every route and totals vehicles and distance.
Plan make_plan(const Instance& inst, std::vector<Route> routes, double objective, double gap);

}  // namespace ctsp
