#include "ctsp/master.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ctsp/mip.hpp"
#include "ctsp/schedule.hpp"

namespace ctsp {

double fixed_cost(const RoutePool& pool, double multiplier) {
  return multiplier * static_cast<double>(pool.max_distance());
}

double fixed_cost_bound(const Instance& inst, double multiplier) {
  const int legs = 2 * std::min(inst.n(), inst.capacity()) - 1;
  return multiplier * std::max(inst.n(), legs) * static_cast<double>(inst.max_distance_entry());
}

double plan_distance_bound(const Instance& inst) {
  return 2.0 * inst.n() * (2.0 * inst.capacity() - 1.0) *
         static_cast<double>(inst.max_distance_entry());
}

Rmp::Rmp(const Instance& inst, CostModel objective, CostModel cut_row)
    : inst_(&inst), objective_(objective), cut_(cut_row) {
  cuts_.driver_fixed.assign(inst.n(), 0);
}

int Rmp::add(Route route) {
  auto key = std::make_tuple(index_of(route.direction), route.driver, route.stops);
  if (index_.count(key)) return -1;
  const int id = static_cast<int>(columns_.size());
  Column c;
  c.cost = objective_(route.distance);
  c.cut_coeff = cut_(route.distance);
  route.cost = c.cost;
  c.route = std::move(route);
  columns_.push_back(std::move(c));
  index_.emplace(std::move(key), id);
  return id;
}

int Rmp::add_pool(const RoutePool& pool) {
  int added = 0;
  for (const Route& r : pool.routes)
    if (add(r) >= 0) ++added;
  return added;
}

std::vector<std::pair<int, double>> Rmp::coefficients(const Column& c) const {
  std::vector<std::pair<int, double>> a;
  const Route& r = c.route;
  const bool in = r.direction == Direction::Inbound;
  for (int i : r.riders) a.emplace_back(in ? row_inbound(i) : row_outbound(i), 1.0);
  a.emplace_back(row_balance(r.driver), in ? 1.0 : -1.0);
  a.emplace_back(row_parity(), 1.0);
  a.emplace_back(row_objective(), c.cut_coeff);
  if (in) a.emplace_back(row_driver(r.driver), 1.0);
  return a;
}

lp::LinearProgram Rmp::build(const std::vector<char>& active, std::vector<int>& var_to_col,
                             bool with_cuts) const {
  const int nn = n();
  lp::LinearProgram lp;
  const int rows = with_cuts ? num_rows() : 3 * nn;
  std::vector<std::vector<std::pair<int, double>>> coeffs(rows);
  var_to_col.clear();
  for (std::size_t id = 0; id < columns_.size(); ++id) {
    if (id < active.size() && !active[id]) continue;
    const int v = lp.add_variable(columns_[id].cost, 0.0, lp::kInf);
    var_to_col.push_back(static_cast<int>(id));
    for (auto [row, a] : coefficients(columns_[id]))
      if (row < rows) coeffs[row].emplace_back(v, a);
  }
  for (int i = 0; i < nn; ++i)
    lp.add_row(std::move(coeffs[row_inbound(i)]), lp::Relation::Equal, 1.0);
  for (int i = 0; i < nn; ++i)
    lp.add_row(std::move(coeffs[row_outbound(i)]), lp::Relation::Equal, 1.0);
  for (int i = 0; i < nn; ++i)
    lp.add_row(std::move(coeffs[row_balance(i)]), lp::Relation::Equal, 0.0);
  if (with_cuts) {
    lp.add_row(std::move(coeffs[row_parity()]), lp::Relation::GreaterEqual, cuts_.parity_rhs);
    lp.add_row(std::move(coeffs[row_objective()]), lp::Relation::GreaterEqual,
               cuts_.objective_rhs);
    for (int i = 0; i < nn; ++i) {
      const bool fixed = i < static_cast<int>(cuts_.driver_fixed.size()) && cuts_.driver_fixed[i];
      lp.add_row(std::move(coeffs[row_driver(i)]),
                 fixed ? lp::Relation::Equal : lp::Relation::GreaterEqual, fixed ? 1.0 : 0.0);
    }
  }
  return lp;
}

RmpResult Rmp::solve(const std::vector<char>& active, const lp::Basis* warm,
                     const lp::SolverOptions& opt) const {
  std::vector<int> var_to_col;
  const lp::LinearProgram lp = build(active, var_to_col);
  const int m = lp.num_rows();

  lp::Basis mapped;
  if (warm && static_cast<int>(warm->basic.size()) == m) {
    std::vector<int> col_to_var(columns_.size(), -1);
    for (std::size_t v = 0; v < var_to_col.size(); ++v) col_to_var[var_to_col[v]] = static_cast<int>(v);
    std::vector<char> logical_used(m, 0);
    for (int e : warm->basic)
      if (e < 0 && -e - 1 < m) logical_used[-e - 1] = 1;
    int spare = 0;
    for (int e : warm->basic) {
      if (e < 0) {
        mapped.basic.push_back(e);
        continue;
      }
      if (e < static_cast<int>(col_to_var.size()) && col_to_var[e] >= 0) {
        mapped.basic.push_back(col_to_var[e]);
        continue;
      }
      while (spare < m && logical_used[spare]) ++spare;
      if (spare < m) {
        logical_used[spare] = 1;
        mapped.basic.push_back(-spare - 1);
      }
    }
    for (int e : warm->at_upper)
      if (e >= 0 && e < static_cast<int>(col_to_var.size()) && col_to_var[e] >= 0)
        mapped.at_upper.push_back(col_to_var[e]);
    if (static_cast<int>(mapped.basic.size()) != m) mapped = lp::Basis{};
  }

  const lp::LpSolution s = lp::solve_lp(lp, opt, mapped.empty() ? nullptr : &mapped);
  RmpResult r;
  r.status = s.status;
  r.iterations = s.iterations;
  r.x.assign(columns_.size(), 0.0);
  if (s.status == lp::Status::Optimal) {
    r.objective = s.objective;
    for (std::size_t v = 0; v < var_to_col.size(); ++v) r.x[var_to_col[v]] = s.x[v];
    r.duals = split(s.duals);
  } else if (s.status == lp::Status::Infeasible) {
    r.duals = split(s.farkas);
  }
  for (int e : s.basis.basic) r.basis.basic.push_back(e >= 0 ? var_to_col[e] : e);
  for (int e : s.basis.at_upper) r.basis.at_upper.push_back(var_to_col[e]);
  return r;
}

Duals Rmp::split(const std::vector<double>& rows) const {
  const int nn = n();
  Duals d;
  if (static_cast<int>(rows.size()) < num_rows()) {
    d.pi_in.assign(nn, 0.0);
    d.pi_out.assign(nn, 0.0);
    d.sigma.assign(nn, 0.0);
    d.phi.assign(nn, 0.0);
    return d;
  }
  d.pi_in.assign(rows.begin(), rows.begin() + nn);
  d.pi_out.assign(rows.begin() + nn, rows.begin() + 2 * nn);
  d.sigma.assign(rows.begin() + 2 * nn, rows.begin() + 3 * nn);
  d.mu = rows[row_parity()];
  d.nu = rows[row_objective()];
  d.phi.assign(rows.begin() + 3 * nn + 2, rows.begin() + 4 * nn + 2);
  return d;
}

double Rmp::reduced_cost(const Column& c, const Duals& d, bool farkas) const {
  double rc = farkas ? 0.0 : c.cost;
  const Route& r = c.route;
  const bool in = r.direction == Direction::Inbound;
  for (int i : r.riders) rc -= in ? d.pi_in[i] : d.pi_out[i];
  rc -= (in ? 1.0 : -1.0) * d.sigma[r.driver];
  rc -= d.mu;
  rc -= d.nu * c.cut_coeff;
  if (in) rc -= d.phi[r.driver];
  return rc;
}

PoolMipResult mip_over_pool(const Rmp& rmp, double time_budget_s, const std::vector<char>* usable,
                            const std::vector<int>* warm_columns) {
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    return time_budget_s -
           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  std::vector<int> var_to_col;
  const std::vector<char> all;
  lp::LinearProgram lp = rmp.build(usable ? *usable : all, var_to_col, false);
  const int nv = lp.num_vars();
  std::vector<int> bins(nv);
  bool integral = true;
  for (int v = 0; v < nv; ++v) {
    bins[v] = v;
    lp.upper[v] = 1.0;
    if (lp.objective[v] != std::floor(lp.objective[v])) integral = false;
  }
  // Driver indicators, branched on before route variables. Once the drivers
  // are fixed the morning and evening sides decouple.
  const int n = rmp.instance().n();
  std::vector<std::vector<std::pair<int, double>>> driver_rows(n);
  for (int v = 0; v < nv; ++v) {
    const Route& route = rmp.columns()[var_to_col[v]].route;
    if (route.direction == Direction::Inbound) driver_rows[route.driver].emplace_back(v, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const int y = lp.add_variable(0.0, 0.0, 1.0);
    bins.push_back(y);
    driver_rows[i].emplace_back(y, -1.0);
    lp.add_row(std::move(driver_rows[i]), lp::Relation::Equal, 0.0);
  }
  std::vector<int> priority(lp.num_vars(), 0);
  std::fill(priority.begin() + nv, priority.end(), 1);

  std::vector<double> warm;
  if (warm_columns) {
    warm.assign(lp.num_vars(), 0.0);
    for (int v = 0; v < nv; ++v)
      if (std::find(warm_columns->begin(), warm_columns->end(), var_to_col[v]) != warm_columns->end()) {
        warm[v] = 1.0;
        const Route& route = rmp.columns()[var_to_col[v]].route;
        if (route.direction == Direction::Inbound) warm[nv + route.driver] = 1.0;
      }
  }
  const std::vector<double>* warm_ptr = warm_columns ? &warm : nullptr;

  PoolMipResult r;
  auto finish = [&](const lp::MipResult& m) {
    r.has_solution = m.has_solution;
    if (!m.has_solution) return;
    r.selected.clear();
    double obj = 0.0;
    for (int v = 0; v < nv; ++v)
      if (m.solution.x[v] > 0.5) {
        r.selected.push_back(var_to_col[v]);
        obj += lp.objective[v];
      }
    r.objective = obj;
  };

  // Every integer solution holds an even number of routes. Under a fixed
  // cost that outweighs any plan distance, minimize the route count first
  // and then the distance at that count.
  const CostModel& model = rmp.objective_model();
  const bool unit = model.fixed > 0 && model.per_meter == 0;
  const bool lexicographic =
      model.fixed > 0 && model.per_meter > 0 &&
      model.fixed > model.per_meter * static_cast<double>(plan_distance_bound(rmp.instance()));

  lp::MipOptions opt;
  opt.time_budget_s = time_budget_s;
  opt.priority = priority;
  if (!lexicographic) {
    opt.integral_objective = integral;
    if (unit) opt.objective_step = 2.0 * model.fixed;
    const lp::MipResult m = lp::solve_binary_mip(lp, bins, opt, warm_ptr);
    finish(m);
    r.nodes = m.nodes;
    r.timed_out = m.timed_out;
    r.bound = m.bound;
    r.gap = m.gap;
    return r;
  }

  lp::LinearProgram count = lp;
  std::fill(count.objective.begin(), count.objective.begin() + nv, 1.0);
  opt.objective_step = 2.0;
  const lp::MipResult first = lp::solve_binary_mip(count, bins, opt, warm_ptr);
  r.nodes = first.nodes;
  r.timed_out = first.timed_out;
  if (!first.has_solution) {
    r.bound = model.fixed * first.bound;
    r.gap = first.gap;
    return r;
  }
  const double vehicles = first.solution.objective;

  lp::LinearProgram distance = lp;
  std::vector<std::pair<int, double>> row;
  for (int v = 0; v < nv; ++v) {
    distance.objective[v] = static_cast<double>(rmp.columns()[var_to_col[v]].route.distance);
    row.emplace_back(v, 1.0);
  }
  distance.add_row(std::move(row), lp::Relation::Equal, vehicles);
  opt.objective_step = 1.0;
  opt.time_budget_s = std::max(0.0, remaining());
  const lp::MipResult second = lp::solve_binary_mip(distance, bins, opt, &first.solution.x);
  finish(second.has_solution ? second : first);
  r.has_solution = true;
  r.nodes += second.nodes;
  r.timed_out = r.timed_out || second.timed_out;
  if (first.timed_out)
    r.bound = model.fixed * first.bound;
  else
    r.bound = model.fixed * vehicles + model.per_meter * (second.has_solution ? second.bound : 0.0);
  r.bound = std::min(r.bound, r.objective);
  r.gap = r.objective > 0 ? (r.objective - r.bound) / r.objective : 0.0;
  if (!r.timed_out) r.gap = 0.0;
  return r;
}

Plan make_plan(const Instance& inst, std::vector<Route> routes, double objective, double gap) {
  Plan p;
  std::sort(routes.begin(), routes.end(), [](const Route& a, const Route& b) {
    if (a.direction != b.direction) return a.direction < b.direction;
    return a.driver < b.driver;
  });
  for (Route& r : routes) {
    if (r.schedule.empty())
      if (auto s = feasible(inst.network(r.direction), r.stops)) r.schedule = s->service_start;
    p.total_distance += r.distance;
  }
  p.vehicle_count = static_cast<int>(routes.size());
  p.routes = std::move(routes);
  p.objective = objective;
  p.gap = gap;
  return p;
}

}  // namespace ctsp
