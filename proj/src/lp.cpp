#include "ctsp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctsp::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

int LinearProgram::add_variable(double cost, double lb, double ub, std::string name) {
  objective.push_back(cost);
  lower.push_back(lb);
  upper.push_back(ub);
  names.push_back(std::move(name));
  return num_vars() - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs,
                           std::string name) {
  rows.push_back(Row{std::move(coeffs), rel, rhs, std::move(name)});
  return num_rows() - 1;
}

void LinearProgram::validate() const {
  const int n = num_vars();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
    throw Error("lp: bound vectors do not match the variable count");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw Error("lp: non-finite objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw Error("lp: inconsistent bounds on variable " + std::to_string(j));
    if (lower[j] == kInf || upper[j] == -kInf) throw Error("lp: infinite fixed bound");
  }
  for (const Row& r : rows) {
    if (!std::isfinite(r.rhs)) throw Error("lp: non-finite right-hand side");
    for (auto [j, a] : r.coeffs) {
      if (j < 0 || j >= n) throw Error("lp: row references unknown variable");
      if (!std::isfinite(a)) throw Error("lp: non-finite coefficient");
    }
  }
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const Row& r : lp.rows) {
    double act = 0.0;
    for (auto [j, a] : r.coeffs) act += a * x[j];
    const double scale = 1.0 + std::abs(r.rhs);
    double v = 0.0;
    switch (r.relation) {
      case Relation::LessEqual: v = act - r.rhs; break;
      case Relation::GreaterEqual: v = r.rhs - act; break;
      case Relation::Equal: v = std::abs(act - r.rhs); break;
    }
    worst = std::max(worst, v / scale);
  }
  return worst;
}

namespace {

enum class Move { Increase, Decrease };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolverOptions& opt) : lp_(lp), opt_(opt) { setup(); }

  LpSolution run(const Basis* warm);

 private:
  void setup();
  void cold_basis();
  bool warm_basis(const Basis& b);
  bool refactor();
  void compute_basic_values();
  double column_dot(int j, const std::vector<double>& y) const;
  void column_solve(int j, std::vector<double>& alpha) const;
  double ptol(double bound) const { return opt_.primal_tol * (1.0 + std::abs(bound)); }
  bool below(int v) const { return lower_[v] > -kInf && x_[v] < lower_[v] - ptol(lower_[v]); }
  bool above(int v) const { return upper_[v] < kInf && x_[v] > upper_[v] + ptol(upper_[v]); }
  LpSolution finish(Status st, const std::vector<double>& y);

  const LinearProgram& lp_;
  SolverOptions opt_;

  int m_ = 0;
  int ns_ = 0;     // structural columns after splitting free variables
  int total_ = 0;  // structurals + logicals
  std::vector<int> split_of_;  // original var -> minus-part column, or -1
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, lower_, upper_, b_, row_scale_;
  std::vector<int> head_, pos_;
  std::vector<char> at_upper_;
  std::vector<double> x_;
  std::vector<double> binv_;
  long iterations_ = 0;
};

void Simplex::setup() {
  m_ = lp_.num_rows();
  const int n = lp_.num_vars();
  const double sign = lp_.sense == Sense::Maximize ? -1.0 : 1.0;

  // Row equilibration by the largest absolute coefficient.
  row_scale_.assign(m_, 1.0);
  for (int i = 0; i < m_; ++i) {
    double big = 0.0;
    for (auto [j, a] : lp_.rows[i].coeffs) big = std::max(big, std::abs(a));
    if (big > 0) row_scale_[i] = 1.0 / big;
  }

  cols_.assign(n, {});
  for (int i = 0; i < m_; ++i)
    for (auto [j, a] : lp_.rows[i].coeffs)
      if (a != 0.0) cols_[j].emplace_back(i, a * row_scale_[i]);

  cost_.assign(n, 0.0);
  lower_ = lp_.lower;
  upper_ = lp_.upper;
  split_of_.assign(n, -1);
  for (int j = 0; j < n; ++j) cost_[j] = sign * lp_.objective[j];
  for (int j = 0; j < n; ++j) {
    if (lower_[j] == -kInf && upper_[j] == kInf) {
      lower_[j] = 0.0;
      split_of_[j] = static_cast<int>(cols_.size());
      auto neg = cols_[j];
      for (auto& e : neg) e.second = -e.second;
      cols_.push_back(std::move(neg));
      cost_.push_back(-cost_[j]);
      lower_.push_back(0.0);
      upper_.push_back(kInf);
    }
  }
  ns_ = static_cast<int>(cols_.size());
  total_ = ns_ + m_;
  for (int i = 0; i < m_; ++i) {
    cost_.push_back(0.0);
    switch (lp_.rows[i].relation) {
      case Relation::LessEqual: lower_.push_back(0.0); upper_.push_back(kInf); break;
      case Relation::GreaterEqual: lower_.push_back(-kInf); upper_.push_back(0.0); break;
      case Relation::Equal: lower_.push_back(0.0); upper_.push_back(0.0); break;
    }
  }
  b_.resize(m_);
  for (int i = 0; i < m_; ++i) b_[i] = lp_.rows[i].rhs * row_scale_[i];

  if (opt_.max_iterations <= 0) opt_.max_iterations = 200L * (m_ + total_) + 5000;
}

void Simplex::cold_basis() {
  head_.resize(m_);
  pos_.assign(total_, -1);
  at_upper_.assign(total_, 0);
  x_.assign(total_, 0.0);
  for (int i = 0; i < m_; ++i) {
    head_[i] = ns_ + i;
    pos_[ns_ + i] = i;
  }
  for (int j = 0; j < ns_; ++j) {
    if (lower_[j] > -kInf) {
      x_[j] = lower_[j];
    } else {
      x_[j] = upper_[j];
      at_upper_[j] = 1;
    }
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
  compute_basic_values();
}

bool Simplex::warm_basis(const Basis& basis) {
  if (static_cast<int>(basis.basic.size()) != m_) return false;
  head_.assign(m_, -1);
  pos_.assign(total_, -1);
  at_upper_.assign(total_, 0);
  x_.assign(total_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const int e = basis.basic[r];
    int v;
    if (e >= 0) {
      if (e >= lp_.num_vars()) return false;
      v = e;
    } else {
      const int i = -e - 1;
      if (i >= m_) return false;
      v = ns_ + i;
    }
    if (pos_[v] >= 0) return false;
    head_[r] = v;
    pos_[v] = r;
  }
  for (int j : basis.at_upper)
    if (j >= 0 && j < lp_.num_vars() && upper_[j] < kInf) at_upper_[j] = 1;
  for (int v = 0; v < total_; ++v) {
    if (pos_[v] >= 0) continue;
    if (at_upper_[v] && upper_[v] < kInf) {
      x_[v] = upper_[v];
    } else if (lower_[v] > -kInf) {
      at_upper_[v] = 0;
      x_[v] = lower_[v];
    } else {
      at_upper_[v] = 1;
      x_[v] = upper_[v];
    }
  }
  if (!refactor()) return false;
  compute_basic_values();
  return true;
}

bool Simplex::refactor() {
  const std::size_t m = m_;
  std::vector<double> a(m * m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const int v = head_[k];
    if (v >= ns_) {
      a[(v - ns_) * m + k] = 1.0;
    } else {
      for (auto [i, val] : cols_[v]) a[i * m + k] = val;
    }
  }
  std::vector<double> inv(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t p = k;
    double best = std::abs(a[k * m + k]);
    for (std::size_t r = k + 1; r < m; ++r) {
      if (std::abs(a[r * m + k]) > best) {
        best = std::abs(a[r * m + k]);
        p = r;
      }
    }
    if (best < 1e-11) return false;
    if (p != k) {
      for (std::size_t c = 0; c < m; ++c) {
        std::swap(a[k * m + c], a[p * m + c]);
        std::swap(inv[k * m + c], inv[p * m + c]);
      }
    }
    const double piv = a[k * m + k];
    for (std::size_t c = 0; c < m; ++c) {
      a[k * m + c] /= piv;
      inv[k * m + c] /= piv;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == k) continue;
      const double f = a[r * m + k];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < m; ++c) {
        a[r * m + c] -= f * a[k * m + c];
        inv[r * m + c] -= f * inv[k * m + c];
      }
    }
  }
  binv_ = std::move(inv);
  return true;
}

void Simplex::compute_basic_values() {
  std::vector<double> rhs = b_;
  for (int v = 0; v < total_; ++v) {
    if (pos_[v] >= 0 || x_[v] == 0.0) continue;
    if (v >= ns_) {
      rhs[v - ns_] -= x_[v];
    } else {
      for (auto [i, a] : cols_[v]) rhs[i] -= a * x_[v];
    }
  }
  const std::size_t m = m_;
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    const double* row = &binv_[r * m];
    for (std::size_t i = 0; i < m; ++i) s += row[i] * rhs[i];
    x_[head_[r]] = s;
  }
}

double Simplex::column_dot(int j, const std::vector<double>& y) const {
  if (j >= ns_) return y[j - ns_];
  double s = 0.0;
  for (auto [i, a] : cols_[j]) s += y[i] * a;
  return s;
}

void Simplex::column_solve(int j, std::vector<double>& alpha) const {
  const std::size_t m = m_;
  alpha.assign(m, 0.0);
  if (j >= ns_) {
    const std::size_t i = j - ns_;
    for (std::size_t r = 0; r < m; ++r) alpha[r] = binv_[r * m + i];
    return;
  }
  for (auto [i, a] : cols_[j])
    for (std::size_t r = 0; r < m; ++r) alpha[r] += binv_[r * m + i] * a;
}

LpSolution Simplex::run(const Basis* warm) {
  if (!(warm && !warm->empty() && warm_basis(*warm))) cold_basis();

  const std::size_t m = m_;
  std::vector<double> cb(m), y(m), alpha;
  int degenerate = 0;
  int since_refactor = 0;
  int recoveries = 0;

  while (true) {
    if (++iterations_ > opt_.max_iterations)
      throw NumericalFailure("simplex: iteration limit exceeded");
    if (since_refactor >= opt_.refactor_every) {
      if (!refactor()) {
        if (++recoveries > 3) throw NumericalFailure("simplex: basis became singular");
        cold_basis();
      } else {
        compute_basic_values();
      }
      since_refactor = 0;
    }

    bool phase1 = false;
    for (std::size_t r = 0; r < m; ++r) {
      const int v = head_[r];
      if (below(v)) {
        cb[r] = -1.0;
        phase1 = true;
      } else if (above(v)) {
        cb[r] = 1.0;
        phase1 = true;
      } else {
        cb[r] = 0.0;
      }
    }
    if (!phase1)
      for (std::size_t r = 0; r < m; ++r) cb[r] = cost_[head_[r]];

    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      if (cb[r] == 0.0) continue;
      const double* row = &binv_[r * m];
      for (std::size_t i = 0; i < m; ++i) y[i] += cb[r] * row[i];
    }

    // Pricing.
    const bool bland = degenerate >= opt_.degenerate_before_bland;
    int enter = -1;
    Move move = Move::Increase;
    double best = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || lower_[j] == upper_[j]) continue;
      const double cj = phase1 ? 0.0 : cost_[j];
      const double d = cj - column_dot(j, y);
      const double tol = phase1 ? opt_.dual_tol : std::max(opt_.dual_tol, 1e-10 * std::abs(cj));
      Move mv;
      if (!at_upper_[j] && d < -tol) {
        mv = Move::Increase;
      } else if (at_upper_[j] && d > tol) {
        mv = Move::Decrease;
      } else {
        continue;
      }
      if (bland) {
        enter = j;
        move = mv;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        enter = j;
        move = mv;
      }
    }

    if (enter < 0) {
      if (phase1) {
        LpSolution s = finish(Status::Infeasible, y);
        return s;
      }
      return finish(Status::Optimal, y);
    }

    column_solve(enter, alpha);
    const double dir = move == Move::Increase ? 1.0 : -1.0;
    double theta = kInf;
    int leave = -1;
    bool leave_to_upper = false;
    if (lower_[enter] > -kInf && upper_[enter] < kInf) theta = upper_[enter] - lower_[enter];
    double leave_alpha = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double a = alpha[r];
      if (std::abs(a) < opt_.pivot_tol) continue;
      const int v = head_[r];
      const double delta = -dir * a;
      const double val = x_[v];
      double limit;
      bool to_upper;
      if (delta < 0) {
        if (phase1 && above(v)) {
          limit = (val - upper_[v]) / -delta;
          to_upper = true;
        } else if (phase1 && below(v)) {
          continue;
        } else if (lower_[v] > -kInf) {
          limit = std::max(0.0, val - lower_[v]) / -delta;
          to_upper = false;
        } else {
          continue;
        }
      } else {
        if (phase1 && below(v)) {
          limit = (lower_[v] - val) / delta;
          to_upper = false;
        } else if (phase1 && above(v)) {
          continue;
        } else if (upper_[v] < kInf) {
          limit = std::max(0.0, upper_[v] - val) / delta;
          to_upper = true;
        } else {
          continue;
        }
      }
      bool take = false;
      if (limit < theta - 1e-12) {
        take = true;
      } else if (limit <= theta + 1e-12 && leave >= 0) {
        take = bland ? v < head_[leave] : std::abs(a) > std::abs(leave_alpha);
      }
      if (take) {
        theta = limit;
        leave = static_cast<int>(r);
        leave_to_upper = to_upper;
        leave_alpha = a;
      }
    }

    if (theta == kInf) {
      if (phase1) throw NumericalFailure("simplex: unbounded phase-one direction");
      return finish(Status::Unbounded, y);
    }

    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;

    x_[enter] += dir * theta;
    for (std::size_t r = 0; r < m; ++r)
      if (alpha[r] != 0.0) x_[head_[r]] -= dir * theta * alpha[r];

    if (leave < 0) {
      at_upper_[enter] = move == Move::Increase ? 1 : 0;
      x_[enter] = at_upper_[enter] ? upper_[enter] : lower_[enter];
      continue;
    }

    const int out = head_[leave];
    x_[out] = leave_to_upper ? upper_[out] : lower_[out];
    at_upper_[out] = leave_to_upper ? 1 : 0;
    pos_[out] = -1;
    head_[leave] = enter;
    pos_[enter] = leave;
    at_upper_[enter] = 0;

    const double piv = alpha[leave];
    double* prow = &binv_[static_cast<std::size_t>(leave) * m];
    for (std::size_t i = 0; i < m; ++i) prow[i] /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (static_cast<int>(r) == leave || alpha[r] == 0.0) continue;
      const double f = alpha[r];
      double* row = &binv_[r * m];
      for (std::size_t i = 0; i < m; ++i) row[i] -= f * prow[i];
    }
    ++since_refactor;
  }
}

LpSolution Simplex::finish(Status st, const std::vector<double>& y) {
  LpSolution s;
  s.status = st;
  s.iterations = static_cast<int>(iterations_);
  const int n = lp_.num_vars();
  const double sign = lp_.sense == Sense::Maximize ? -1.0 : 1.0;

  s.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    s.x[j] = x_[j];
    if (split_of_[j] >= 0) s.x[j] -= x_[split_of_[j]];
  }
  std::vector<double> yo(m_);
  for (int i = 0; i < m_; ++i) yo[i] = y[i] * row_scale_[i];

  if (st == Status::Infeasible) {
    // Phase-one multipliers; flip so that farkas . a > 0 marks improving columns.
    s.farkas.resize(m_);
    for (int i = 0; i < m_; ++i) s.farkas[i] = yo[i];
  } else {
    s.duals.resize(m_);
    for (int i = 0; i < m_; ++i) s.duals[i] = sign * yo[i];
    s.reduced_costs.resize(n);
    for (int j = 0; j < n; ++j) s.reduced_costs[j] = sign * (cost_[j] - column_dot(j, y));
  }
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += lp_.objective[j] * s.x[j];
  s.objective = obj;

  for (int r = 0; r < m_; ++r) {
    const int v = head_[r];
    s.basis.basic.push_back(v >= ns_ ? -(v - ns_) - 1 : v);
  }
  for (int j = 0; j < n; ++j)
    if (pos_[j] < 0 && at_upper_[j]) s.basis.at_upper.push_back(j);
  // Split minus-parts are not representable; drop them from the basis.
  for (int& e : s.basis.basic)
    if (e >= n) e = -1 - m_;
  if (std::any_of(s.basis.basic.begin(), s.basis.basic.end(), [&](int e) { return e == -1 - m_; }))
    s.basis = Basis{};
  return s;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opt, const Basis* warm) {
  lp.validate();
  if (lp.num_rows() == 0) {
    // Bounds only: each variable sits at its cheapest bound.
    LpSolution s;
    s.status = Status::Optimal;
    const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    s.x.assign(lp.num_vars(), 0.0);
    for (int j = 0; j < lp.num_vars(); ++j) {
      const double c = sign * lp.objective[j];
      double v;
      if (c > 0) v = lp.lower[j];
      else if (c < 0) v = lp.upper[j];
      else v = lp.lower[j] > -kInf ? lp.lower[j] : (lp.upper[j] < kInf ? lp.upper[j] : 0.0);
      if (!std::isfinite(v)) {
        s.status = Status::Unbounded;
        v = 0.0;
      }
      s.x[j] = v;
      s.objective += lp.objective[j] * v;
    }
    s.reduced_costs = lp.objective;
    return s;
  }
  Simplex simplex(lp, opt);
  return simplex.run(warm);
}

}  // namespace ctsp::lp
