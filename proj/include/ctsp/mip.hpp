#pragma once

#include <vector>

#include "ctsp/lp.hpp"

namespace ctsp::lp {

struct MipOptions {
  double time_budget_s = kInf;
  double integrality_tol = 1e-6;
  // Objective values of integer solutions are integral; prunes nodes whose
  // bound cannot beat the incumbent by at least one.
  bool integral_objective = false;
  // Objective values of integer solutions are multiples of this (0: any).
  // Subsumes integral_objective when set.
  double objective_step = 0.0;
  long node_limit = 0;  // 0 = unlimited
  // Branching priority per variable (empty: all equal). Fractional binaries
  // of the highest priority are branched on first.
  std::vector<int> priority;
  SolverOptions lp;
};

struct MipResult {
  LpSolution solution;  // status Optimal when an integer solution is held
  bool has_solution = false;
  double bound = -kInf;  // proven bound on the optimum (objective sense)
  double gap = kInf;     // |incumbent - bound| / |incumbent|; 0 when proven
  long nodes = 0;        // LP solves in the tree, root included
  long branched = 0;     // nodes split into children
  bool timed_out = false;
};

// Depth-first branch-and-bound over binary variables (most fractional
// first, up-branch first). A feasible warm start seeds the incumbent.
MipResult solve_binary_mip(const LinearProgram& lp, const std::vector<int>& binaries,
                           const MipOptions& opt = {},
                           const std::vector<double>* warm_start = nullptr);

}  // namespace ctsp::lp
