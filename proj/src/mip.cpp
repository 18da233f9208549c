#include "ctsp/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ctsp::lp {

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  Basis basis;
  double bound;  // internal (minimization) sense
};

}  // namespace

MipResult solve_binary_mip(const LinearProgram& lp, const std::vector<int>& binaries,
                           const MipOptions& opt, const std::vector<double>* warm_start) {
  lp.validate();
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const double sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
  const int n = lp.num_vars();
  if (!opt.priority.empty() && static_cast<int>(opt.priority.size()) != n)
    throw Error("mip: priority size does not match the variable count");

  LinearProgram work = lp;
  for (int j : binaries) {
    if (j < 0 || j >= n) throw Error("mip: binary index out of range");
    work.lower[j] = std::max(work.lower[j], 0.0);
    work.upper[j] = std::min(work.upper[j], 1.0);
  }

  MipResult res;
  double incumbent = kInf;  // internal sense

  auto is_integral = [&](const std::vector<double>& x) {
    for (int j : binaries)
      if (std::abs(x[j] - std::round(x[j])) > opt.integrality_tol) return false;
    return true;
  };
  auto accept = [&](std::vector<double> x) {
    for (int j : binaries) x[j] = std::round(x[j]);
    if (max_violation(work, x) > 1e-7) return false;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
    if (sign * obj < incumbent) {
      incumbent = sign * obj;
      res.solution.x = std::move(x);
      res.solution.objective = obj;
      res.solution.status = Status::Optimal;
      res.has_solution = true;
    }
    return true;
  };
  const double step = opt.objective_step > 0 ? opt.objective_step : opt.integral_objective ? 1.0 : 0.0;
  // Least attainable objective value not below `bound`.
  auto round_up = [&](double bound) {
    if (step <= 0 || bound == kInf || bound == -kInf) return bound;
    const double q = bound / step;
    return step * std::ceil(q - 1e-9 * (1.0 + std::abs(q)));
  };
  auto prunable = [&](double bound) {
    if (incumbent == kInf) return false;
    return round_up(bound) >= incumbent - 1e-9 * (1.0 + std::abs(incumbent));
  };

  if (warm_start && static_cast<int>(warm_start->size()) == n && is_integral(*warm_start))
    accept(*warm_start);

  LpSolution root = solve_lp(work, opt.lp);
  res.nodes = 1;
  res.solution.iterations = root.iterations;
  if (root.status == Status::Unbounded) {
    res.solution.status = Status::Unbounded;
    res.gap = kInf;
    return res;
  }
  if (root.status == Status::Infeasible) {
    res.solution.status = Status::Infeasible;
    res.has_solution = false;
    res.bound = sign * kInf;
    return res;
  }

  std::vector<Node> stack;
  stack.push_back(Node{work.lower, work.upper, {}, sign * root.objective});
  LpSolution pending = std::move(root);
  bool have_pending = true;
  bool plunge = false;
  double open_bound = kInf;  // min bound over nodes abandoned by the limits

  while (!stack.empty()) {
    if (!have_pending && (elapsed() >= opt.time_budget_s ||
                          (opt.node_limit > 0 && res.nodes >= opt.node_limit))) {
      res.timed_out = true;
      for (const Node& nd : stack) open_bound = std::min(open_bound, nd.bound);
      break;
    }
    // Plunge into the newest child; otherwise take the open node with the
    // least bound.
    std::size_t at = stack.size() - 1;
    if (!plunge) {
      for (std::size_t i = 0; i < stack.size(); ++i)
        if (stack[i].bound < stack[at].bound) at = i;
    }
    plunge = false;
    Node node = std::move(stack[at]);
    stack[at] = std::move(stack.back());
    stack.pop_back();
    if (prunable(node.bound)) {
      have_pending = false;
      continue;
    }

    LpSolution sol;
    if (have_pending) {
      sol = std::move(pending);
      have_pending = false;
      if (elapsed() >= opt.time_budget_s) {
        // Zero budget: root relaxation only.
        const bool closed = sol.status == Status::Optimal && is_integral(sol.x) && accept(sol.x);
        if (!closed) {
          res.timed_out = true;
          open_bound = std::min(open_bound, sign * sol.objective);
        }
        break;
      }
    } else {
      work.lower = node.lower;
      work.upper = node.upper;
      sol = solve_lp(work, opt.lp, node.basis.empty() ? nullptr : &node.basis);
      ++res.nodes;
    }
    if (sol.status != Status::Optimal) continue;
    const double bound = sign * sol.objective;
    if (prunable(bound)) continue;

    int pick = -1, pick_priority = 0;
    double best = 2.0;
    for (int j : binaries) {
      const double f = sol.x[j] - std::floor(sol.x[j]);
      if (f <= opt.integrality_tol || f >= 1.0 - opt.integrality_tol) continue;
      const int pr = opt.priority.empty() ? 0 : opt.priority[j];
      const double dist = std::abs(f - 0.5);
      if (pick < 0 || pr > pick_priority || (pr == pick_priority && dist < best)) {
        best = dist;
        pick = j;
        pick_priority = pr;
      }
    }

    if (pick < 0) {
      if (!accept(sol.x)) {
        // Rounding broke a row; settle the continuous part with binaries fixed.
        work.lower = node.lower;
        work.upper = node.upper;
        for (int j : binaries) work.lower[j] = work.upper[j] = std::round(sol.x[j]);
        LpSolution fixed = solve_lp(work, opt.lp);
        ++res.nodes;
        if (fixed.status == Status::Optimal) accept(fixed.x);
      }
      continue;
    }

    // Reduced-cost fixing: a nonbasic binary whose move to the opposite bound
    // cannot beat the incumbent stays where it is in the whole subtree.
    if (incumbent < kInf && sol.reduced_costs.size() == static_cast<std::size_t>(n)) {
      for (int j : binaries) {
        if (j == pick || node.lower[j] == node.upper[j]) continue;
        const double d = sign * sol.reduced_costs[j];
        if (sol.x[j] <= opt.integrality_tol && d > 0 && prunable(bound + d))
          node.upper[j] = 0.0;
        else if (sol.x[j] >= 1.0 - opt.integrality_tol && d < 0 && prunable(bound - d))
          node.lower[j] = 1.0;
      }
    }

    ++res.branched;
    Node down{node.lower, node.upper, sol.basis, bound};
    down.upper[pick] = 0.0;
    Node up{std::move(node.lower), std::move(node.upper), sol.basis, bound};
    up.lower[pick] = 1.0;
    stack.push_back(std::move(down));
    stack.push_back(std::move(up));
    plunge = true;
  }

  double lb = round_up(std::min(open_bound, incumbent));
  if (!res.has_solution) {
    res.solution.status = Status::Infeasible;
    res.bound = sign * (res.timed_out ? open_bound : kInf);
    res.gap = kInf;
    return res;
  }
  lb = std::min(lb, incumbent);
  res.bound = sign * lb;
  res.gap = incumbent == lb ? 0.0 : (incumbent - lb) / std::max(std::abs(incumbent), 1e-12);
  return res;
}

}  // namespace ctsp::lp
