#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ctsp/model.hpp"

namespace ctsp::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status s);

struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  Relation relation = Relation::Equal;
  double rhs = 0.0;
  std::string name;
};

struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> names;
  std::vector<Row> rows;

  int add_variable(double cost, double lb = 0.0, double ub = kInf, std::string name = {});
  int add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs,
              std::string name = {});
  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Throws on dimension mismatch or non-finite data.
  void validate() const;
};

// Basis in solver space: entries >= 0 are structural variables, entries
// -(i+1) the logical of row i. Nonbasic structurals listed in `at_upper`
// sit at their upper bound.
struct Basis {
  std::vector<int> basic;
  std::vector<int> at_upper;
  bool empty() const { return basic.empty(); }
};

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  std::vector<double> duals;  // one per row, objective-sense convention
  std::vector<double> reduced_costs;
  double objective = 0.0;
  // Phase-one row multipliers when infeasible: a column a with
  // farkas . a > 0 would reduce the infeasibility.
  std::vector<double> farkas;
  Basis basis;
  int iterations = 0;
};

struct SolverOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_every = 64;
  int degenerate_before_bland = 50;
  long max_iterations = 0;  // 0 = automatic
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Bounded revised simplex (dense explicit inverse, Dantzig pricing with a
// Bland fallback under degeneracy). Free variables are split internally.
LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opt = {},
                    const Basis* warm = nullptr);

// Max row violation of x against lp (bounds included).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

// CPLEX-style LP text format used by the external-solver adapter.
void write_lp_format(const LinearProgram& lp, std::ostream& os,
                     const std::vector<int>& binaries = {});
LinearProgram read_lp_format(std::istream& is, std::vector<int>* binaries = nullptr);

}  // namespace ctsp::lp
