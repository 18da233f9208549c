#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "ctsp/lp.hpp"
#include "ctsp/mip.hpp"
#include "doctest.h"

using namespace ctsp::lp;

namespace {

// Dense Gaussian elimination; false when singular.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(a[r][k]) > std::abs(a[p][k])) p = r;
    if (std::abs(a[p][k]) < 1e-10) return false;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (int r = k + 1; r < n; ++r) {
      const double f = a[r][k] / a[k][k];
      for (int c = k; c < n; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  x.assign(n, 0.0);
  for (int k = n - 1; k >= 0; --k) {
    double s = b[k];
    for (int c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return true;
}

// Minimum over all vertices of a box-bounded polytope; nullopt if empty.
std::optional<double> vertex_oracle(const LinearProgram& lp) {
  const int n = lp.num_vars();
  std::vector<std::vector<double>> hyper;
  std::vector<double> rhs;
  for (const Row& r : lp.rows) {
    std::vector<double> a(n, 0.0);
    for (auto [j, v] : r.coeffs) a[j] += v;
    hyper.push_back(a);
    rhs.push_back(r.rhs);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    hyper.push_back(a);
    rhs.push_back(lp.lower[j]);
    hyper.push_back(a);
    rhs.push_back(lp.upper[j]);
  }
  const int h = static_cast<int>(hyper.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i : pick) {
      a.push_back(hyper[i]);
      b.push_back(rhs[i]);
    }
    std::vector<double> x;
    if (solve_dense(a, b, x) && max_violation(lp, x) < 1e-7) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
      const double key = lp.sense == Sense::Minimize ? obj : -obj;
      if (!best || key < (lp.sense == Sense::Minimize ? *best : -*best)) best = obj;
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == h - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

void check_certificates(const LinearProgram& lp, const LpSolution& s) {
  REQUIRE(s.status == Status::Optimal);
  CHECK(max_violation(lp, s.x) < 1e-7);
  const int m = lp.num_rows();
  // Complementary slackness on rows, and dual objective equals primal.
  double dual_obj = 0.0;
  const double sg = lp.sense == Sense::Minimize ? 1.0 : -1.0;
  std::vector<double> d = lp.objective;
  for (int i = 0; i < m; ++i) {
    const Row& r = lp.rows[i];
    double act = 0.0;
    for (auto [j, a] : r.coeffs) {
      act += a * s.x[j];
      d[j] -= s.duals[i] * a;
    }
    const double y = sg * s.duals[i];
    if (r.relation == Relation::LessEqual) CHECK(y <= 1e-7);
    if (r.relation == Relation::GreaterEqual) CHECK(y >= -1e-7);
    CHECK(std::abs(s.duals[i] * (act - r.rhs)) < 1e-6 * (1 + std::abs(s.objective)));
    dual_obj += s.duals[i] * r.rhs;
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    CHECK(std::abs(d[j] - s.reduced_costs[j]) < 1e-6 * (1 + std::abs(lp.objective[j])));
    const double dj = sg * d[j];
    if (s.x[j] > lp.lower[j] + 1e-7 && s.x[j] < lp.upper[j] - 1e-7) CHECK(std::abs(dj) < 1e-6);
    if (dj > 1e-6) CHECK(s.x[j] <= lp.lower[j] + 1e-6);
    if (dj < -1e-6) CHECK(s.x[j] >= lp.upper[j] - 1e-6);
    if (s.x[j] == lp.upper[j] && std::isfinite(lp.upper[j])) dual_obj += d[j] * lp.upper[j];
    else if (std::isfinite(lp.lower[j])) dual_obj += d[j] * lp.lower[j];
  }
  CHECK(std::abs(dual_obj - s.objective) < 1e-6 * (1 + std::abs(s.objective)));
}

}  // namespace

TEST_CASE("single bounded variable") {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable(1.0);
  lp.add_row({{0, 1.0}}, Relation::LessEqual, 3.0);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(3.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded programs") {
  LinearProgram inf;
  inf.add_variable(1.0);
  inf.add_row({{0, 1.0}}, Relation::GreaterEqual, 2.0);
  inf.add_row({{0, 1.0}}, Relation::LessEqual, 1.0);
  const LpSolution a = solve_lp(inf);
  CHECK(a.status == Status::Infeasible);
  REQUIRE(a.farkas.size() == 2);

  LinearProgram unb;
  unb.sense = Sense::Maximize;
  unb.add_variable(1.0);
  unb.add_variable(1.0);
  unb.add_row({{0, 1.0}, {1, -1.0}}, Relation::LessEqual, 1.0);
  CHECK(solve_lp(unb).status == Status::Unbounded);
}

TEST_CASE("redundant equalities keep complementary slackness") {
  LinearProgram lp;
  for (int j = 0; j < 3; ++j) lp.add_variable(1.0 + j);
  lp.add_row({{0, 1}, {1, 1}, {2, 1}}, Relation::Equal, 2.0);
  lp.add_row({{0, 2}, {1, 2}, {2, 2}}, Relation::Equal, 4.0);
  lp.add_row({{0, 1}}, Relation::LessEqual, 1.5);
  const LpSolution s = solve_lp(lp);
  check_certificates(lp, s);
  CHECK(s.objective == doctest::Approx(1.5 + 2 * 0.5));
}

TEST_CASE("free variables are split") {
  LinearProgram lp;
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_variable(0.0);
  lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::GreaterEqual, -4.0);
  lp.add_row({{1, 1.0}}, Relation::LessEqual, 2.0);
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(-6.0));
}

TEST_CASE("random programs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-5, 5);
  std::uniform_int_distribution<int> nv(1, 6), nr(1, 5), rel(0, 2);
  int optimal = 0;
  for (int trial = 0; trial < 150; ++trial) {
    LinearProgram lp;
    lp.sense = trial % 2 ? Sense::Maximize : Sense::Minimize;
    const int n = nv(rng);
    for (int j = 0; j < n; ++j) lp.add_variable(std::round(coef(rng)), 0.0, 1.0 + std::abs(std::round(coef(rng))));
    const int m = nr(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j)
        if (rng() % 3) row.emplace_back(j, std::round(coef(rng)));
      lp.add_row(row, static_cast<Relation>(rel(rng)), std::round(coef(rng)));
    }
    const auto expect = vertex_oracle(lp);
    const LpSolution s = solve_lp(lp);
    if (!expect) {
      CHECK(s.status == Status::Infeasible);
      continue;
    }
    ++optimal;
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(*expect).epsilon(1e-7));
    check_certificates(lp, s);
  }
  CHECK(optimal >= 30);
}

TEST_CASE("warm start from an optimal basis takes no pivots") {
  LinearProgram lp;
  for (int j = 0; j < 4; ++j) lp.add_variable(3.0 - j);
  lp.add_row({{0, 1}, {1, 1}, {2, 1}, {3, 1}}, Relation::Equal, 2.0);
  lp.add_row({{2, 1}, {3, 1}}, Relation::LessEqual, 1.0);
  const LpSolution cold = solve_lp(lp);
  const LpSolution warm = solve_lp(lp, {}, &cold.basis);
  REQUIRE(warm.status == Status::Optimal);
  CHECK(warm.objective == doctest::Approx(cold.objective));
  CHECK(warm.iterations <= 1);
}

TEST_CASE("LP text format round trip") {
  LinearProgram lp;
  lp.add_variable(2.0, 0.0, 1.0, "a");
  lp.add_variable(-1.5, -kInf, kInf, "b");
  lp.add_variable(0.0, -3.0, 4.0, "c");
  lp.add_row({{0, 1}, {1, -2}}, Relation::GreaterEqual, -1.0, "r1");
  lp.add_row({{1, 1}, {2, 0.25}}, Relation::LessEqual, 5.0, "r2");
  std::stringstream ss;
  write_lp_format(lp, ss, {0});
  std::vector<int> bins;
  const LinearProgram back = read_lp_format(ss, &bins);
  REQUIRE(back.num_vars() == 3);
  REQUIRE(back.num_rows() == 2);
  CHECK(bins == std::vector<int>{0});
  CHECK(back.objective == lp.objective);
  CHECK(back.lower == lp.lower);
  CHECK(back.upper == lp.upper);
  CHECK(back.rows[0].coeffs == lp.rows[0].coeffs);
  CHECK(back.rows[1].relation == Relation::LessEqual);
  CHECK(back.rows[1].rhs == 5.0);
}

namespace {

// Set partitioning by exhaustive column subsets.
std::optional<double> partition_oracle(int elements, const std::vector<std::vector<int>>& cols,
                                       const std::vector<double>& cost) {
  std::optional<double> best;
  const int k = static_cast<int>(cols.size());
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<int> cover(elements, 0);
    double c = 0;
    for (int j = 0; j < k; ++j)
      if (mask >> j & 1) {
        c += cost[j];
        for (int e : cols[j]) ++cover[e];
      }
    if (std::all_of(cover.begin(), cover.end(), [](int v) { return v == 1; }) && (!best || c < *best))
      best = c;
  }
  return best;
}

}  // namespace

TEST_CASE("binary MIP matches exhaustive set partitioning") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int elements = 3 + trial % 3;
    const int k = 5 + trial % 6;
    std::vector<std::vector<int>> cols;
    std::vector<double> cost;
    LinearProgram lp;
    std::vector<int> bins;
    for (int j = 0; j < k; ++j) {
      std::vector<int> c;
      for (int e = 0; e < elements; ++e)
        if (rng() % 2) c.push_back(e);
      if (c.empty()) c.push_back(static_cast<int>(rng() % elements));
      cols.push_back(c);
      cost.push_back(static_cast<double>(1 + rng() % 20));
      bins.push_back(lp.add_variable(cost.back(), 0, 1));
    }
    for (int e = 0; e < elements; ++e) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < k; ++j)
        if (std::find(cols[j].begin(), cols[j].end(), e) != cols[j].end()) row.emplace_back(j, 1.0);
      lp.add_row(row, Relation::Equal, 1.0);
    }
    const auto expect = partition_oracle(elements, cols, cost);
    const MipResult r = solve_binary_mip(lp, bins);
    if (!expect) {
      CHECK_FALSE(r.has_solution);
      continue;
    }
    REQUIRE(r.has_solution);
    CHECK(r.solution.objective == doctest::Approx(*expect));
    CHECK(r.gap == 0.0);
    CHECK(max_violation(lp, r.solution.x) <= 1e-7);
  }
}

TEST_CASE("integral relaxation needs no branching") {
  LinearProgram lp;
  std::vector<int> bins;
  for (int j = 0; j < 3; ++j) bins.push_back(lp.add_variable(1.0 + j, 0, 1));
  lp.add_row({{0, 1}, {1, 1}}, Relation::Equal, 1.0);
  lp.add_row({{2, 1}}, Relation::Equal, 1.0);
  const MipResult r = solve_binary_mip(lp, bins);
  REQUIRE(r.has_solution);
  CHECK(r.branched == 0);
  CHECK(r.solution.objective == doctest::Approx(4.0));
}

TEST_CASE("zero budget returns the warm start with the root gap") {
  // Odd cycle: relaxation 1.5 at x = 1/2, integer optimum 2.
  LinearProgram lp;
  std::vector<int> bins;
  for (int j = 0; j < 3; ++j) bins.push_back(lp.add_variable(1.0, 0, 1));
  lp.add_row({{0, 1}, {1, 1}}, Relation::GreaterEqual, 1.0);
  lp.add_row({{1, 1}, {2, 1}}, Relation::GreaterEqual, 1.0);
  lp.add_row({{0, 1}, {2, 1}}, Relation::GreaterEqual, 1.0);
  const std::vector<double> warm{1, 1, 1};
  MipOptions opt;
  opt.time_budget_s = 0.0;
  const MipResult r = solve_binary_mip(lp, bins, opt, &warm);
  REQUIRE(r.has_solution);
  CHECK(r.solution.x == warm);
  CHECK(r.bound == doctest::Approx(1.5));
  CHECK(r.gap == doctest::Approx(0.5));

  const MipResult full = solve_binary_mip(lp, bins, {}, &warm);
  CHECK(full.solution.objective == doctest::Approx(2.0));
  CHECK(full.gap == 0.0);
}

TEST_CASE("priorities, steps and fixing keep the optimum of random knapsacks") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 4 + trial % 7;
    const bool maximize = trial % 2 == 0;
    LinearProgram lp;
    lp.sense = maximize ? Sense::Maximize : Sense::Minimize;
    std::vector<int> bins;
    std::vector<double> cost;
    for (int j = 0; j < k; ++j) {
      cost.push_back(static_cast<double>(1 + rng() % 30));
      bins.push_back(lp.add_variable(cost.back(), 0, 1));
    }
    std::vector<std::vector<double>> a(2, std::vector<double>(k));
    std::vector<double> rhs(2);
    for (int i = 0; i < 2; ++i) {
      std::vector<std::pair<int, double>> row;
      double total = 0;
      for (int j = 0; j < k; ++j) {
        a[i][j] = static_cast<double>(1 + rng() % 9);
        total += a[i][j];
        row.emplace_back(j, a[i][j]);
      }
      rhs[i] = std::floor(total / 2);
      lp.add_row(row, maximize ? Relation::LessEqual : Relation::GreaterEqual, rhs[i]);
    }
    std::optional<double> best;
    std::vector<double> best_x;
    for (int mask = 0; mask < (1 << k); ++mask) {
      bool ok = true;
      for (int i = 0; i < 2; ++i) {
        double lhs = 0;
        for (int j = 0; j < k; ++j)
          if (mask >> j & 1) lhs += a[i][j];
        ok = ok && (maximize ? lhs <= rhs[i] : lhs >= rhs[i]);
      }
      if (!ok) continue;
      double c = 0;
      for (int j = 0; j < k; ++j)
        if (mask >> j & 1) c += cost[j];
      if (!best || (maximize ? c > *best : c < *best)) {
        best = c;
        best_x.assign(k, 0.0);
        for (int j = 0; j < k; ++j) best_x[j] = mask >> j & 1;
      }
    }
    REQUIRE(best);
    // Any feasible point works as a warm start; the trivial one is far from optimal.
    const std::vector<double> warm(k, maximize ? 0.0 : 1.0);
    MipOptions opt;
    opt.objective_step = 1.0;
    opt.priority.resize(k);
    for (int& p : opt.priority) p = static_cast<int>(rng() % 3);
    const MipResult r = solve_binary_mip(lp, bins, opt, &warm);
    REQUIRE(r.has_solution);
    CHECK(r.solution.objective == doctest::Approx(*best));
    CHECK(r.gap == 0.0);
    CHECK(max_violation(lp, r.solution.x) <= 1e-7);
  }
  LinearProgram lp;
  lp.add_variable(1.0, 0, 1);
  MipOptions bad;
  bad.priority = {1, 2};
  CHECK_THROWS_AS(solve_binary_mip(lp, {0}, bad), ctsp::Error);
}
