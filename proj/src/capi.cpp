#include "ctsp/ctsp.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "ctsp/bnp.hpp"
#include "ctsp/cluster.hpp"
#include "ctsp/enumerate.hpp"
#include "ctsp/harness.hpp"
#include "ctsp/io.hpp"

struct ctsp_instance {
  ctsp::Instance inst;
};

struct ctsp_result {
  ctsp::Instance inst;
  std::string algorithm;
  ctsp::SolveStatus status = ctsp::SolveStatus::NoSolution;
  ctsp::Plan plan;
  ctsp::Json stats;
};

namespace {

thread_local std::string g_error;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
ctsp_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const IoFailure& e) {
    g_error = e.what();
    return CTSP_E_IO;
  } catch (const ctsp::Json::exception& e) {
    g_error = e.what();
    return CTSP_E_FORMAT;
  } catch (const ctsp::Error& e) {
    g_error = e.what();
    return CTSP_E_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return CTSP_E_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return CTSP_E_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return CTSP_E_INTERNAL;
  }
}

ctsp_status fail(ctsp_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ctsp::Json parse_options(const char* json) {
  if (!json || !*json) return ctsp::Json::object();
  ctsp::Json j = ctsp::Json::parse(json);
  if (!j.is_object()) throw ctsp::Error("options must be a JSON object");
  return j;
}

ctsp::Json read_file(const char* path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(std::string("cannot open ") + path);
  return ctsp::Json::parse(in);
}

ctsp::Json bpa_stats_json(const ctsp::BpaStats& s) {
  return {{"tree_nodes", s.tree_nodes},
          {"columns", s.columns},
          {"seed_columns", s.seed_columns},
          {"inbound_edges", s.inbound_edges},
          {"outbound_edges", s.outbound_edges},
          {"cg_iterations", s.cg_iterations},
          {"pricing_calls", s.pricing_calls},
          {"infeasible_candidates", s.infeasible_candidates},
          {"labels", s.labels},
          {"root_lp", s.root_lp},
          {"root_lp_nocuts", s.root_lp_nocuts},
          {"fixed_cost", s.fixed_cost},
          {"rmp_convergence_s", s.rmp_convergence_s},
          {"root_solution_s", s.root_solution_s},
          {"best_solution_s", s.best_solution_s},
          {"total_s", s.total_s}};
}

}  // namespace

extern "C" {

const char* ctsp_last_error(void) { return g_error.c_str(); }

const char* ctsp_version(void) { return "1.0.0"; }

void ctsp_string_free(char* s) { std::free(s); }

ctsp_status ctsp_instance_load(const char* path, ctsp_instance** out) {
  if (!path || !out) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Json j = read_file(path);
    *out = new ctsp_instance{ctsp::instance_from_json(j)};
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_parse(const char* json, ctsp_instance** out) {
  if (!json || !out) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ctsp_instance{ctsp::instance_from_json(ctsp::Json::parse(json))};
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_generate(const char* spec_json, ctsp_instance** out) {
  if (!out) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Json j = parse_options(spec_json);
    const ctsp::Population pop = ctsp::generate_population(ctsp::population_spec_from_json(j));
    *out = new ctsp_instance{ctsp::population_instance(pop, ctsp::parameters_from_json(j))};
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_with_parameters(const ctsp_instance* inst, const char* params_json,
                                          ctsp_instance** out) {
  if (!inst || !out) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Parameters p = ctsp::parameters_from_json(parse_options(params_json), inst->inst.params());
    *out = new ctsp_instance{ctsp::with_parameters(inst->inst, p)};
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_subset(const ctsp_instance* inst, const int* commuters, int count,
                                 ctsp_instance** out) {
  if (!inst || !out || count < 0 || (count > 0 && !commuters))
    return fail(CTSP_E_ARGUMENT, "invalid argument");
  return guarded([&] {
    std::vector<int> ids(commuters, commuters + count);
    *out = new ctsp_instance{ctsp::subinstance(inst->inst, ids)};
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_commuters(const ctsp_instance* inst, int* n) {
  if (!inst || !n) return fail(CTSP_E_ARGUMENT, "null argument");
  *n = inst->inst.n();
  return CTSP_OK;
}

ctsp_status ctsp_instance_to_json(const ctsp_instance* inst, char** json) {
  if (!inst || !json) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    *json = copy_string(ctsp::instance_to_json(inst->inst).dump(2));
    return CTSP_OK;
  });
}

ctsp_status ctsp_instance_save(const ctsp_instance* inst, const char* path) {
  if (!inst || !path) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream f(path);
    if (!f) throw IoFailure(std::string("cannot write ") + path);
    f << ctsp::instance_to_json(inst->inst).dump(2) << '\n';
    if (!f) throw IoFailure(std::string("cannot write ") + path);
    return CTSP_OK;
  });
}

void ctsp_instance_free(ctsp_instance* inst) { delete inst; }

ctsp_status ctsp_solve(const ctsp_instance* inst, const char* algorithm, const char* options_json,
                       ctsp_result** out) {
  if (!inst || !algorithm || !out) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&]() -> ctsp_status {
    const ctsp::Json o = parse_options(options_json);
    const std::string algo = algorithm;
    auto res = std::make_unique<ctsp_result>(ctsp_result{inst->inst, algo, {}, {}, {}});
    const int threads = o.value("threads", 1);
    if (algo == "rea") {
      ctsp::ReaOptions ro;
      ro.threads = threads;
      ro.fixed_cost = o.value("fixed_cost", 0.0);
      ro.mip_budget_s = o.value("mip_budget_s", o.value("time_limit_s", ro.mip_budget_s));
      const ctsp::ReaResult r = ctsp::solve_rea(inst->inst, ro);
      res->status = r.result.status;
      res->plan = r.result.plan;
      res->stats = {{"objective", r.result.objective}, {"bound", r.result.bound},
                    {"gap", r.result.gap},             {"columns", r.columns},
                    {"enumerate_s", r.enumerate_s},    {"mip_s", r.mip_s},
                    {"root_lp", r.result.stats.root_lp}, {"fixed_cost", r.result.stats.fixed_cost},
                    {"routes_by_size", r.pool.routes}};
    } else if (algo == "bpa") {
      ctsp::BpaOptions bo;
      bo.threads = threads;
      bo.time_limit_s = o.value("time_limit_s", bo.time_limit_s);
      bo.use_cuts = o.value("use_cuts", bo.use_cuts);
      bo.fixed_cost = o.value("fixed_cost", bo.fixed_cost);
      bo.mip_budget_s = o.value("mip_budget_s", bo.mip_budget_s);
      const ctsp::SolveResult r = ctsp::solve_bpa(inst->inst, bo);
      res->status = r.status;
      res->plan = r.plan;
      res->stats = bpa_stats_json(r.stats);
      res->stats["objective"] = r.objective;
      res->stats["bound"] = r.bound;
      res->stats["gap"] = r.gap;
    } else if (algo == "heuristic") {
      ctsp::HeuristicOptions ho;
      ho.threads = threads;
      ho.t_rmp_s = o.value("t_rmp_s", ho.t_rmp_s);
      ho.t_mip_s = o.value("t_mip_s", ho.t_mip_s);
      ho.relax_forbidden = o.value("relax_forbidden", ho.relax_forbidden);
      const ctsp::HeuristicResult r = ctsp::root_heuristic(inst->inst, ho);
      res->status = r.status;
      res->plan = r.plan;
      res->stats = {{"z_mip", r.z_mip},
                    {"z_rmp", r.z_rmp},
                    {"z_lb", r.z_lb},
                    {"rc_star", r.rc_star},
                    {"converged", r.converged},
                    {"farley", r.farley},
                    {"gap", r.gap},
                    {"columns", r.columns},
                    {"infeasible_columns", r.infeasible_columns},
                    {"cg_iterations", r.cg_iterations},
                    {"rmp_s", r.rmp_s},
                    {"mip_s", r.mip_s},
                    {"total_s", r.total_s}};
    } else {
      return fail(CTSP_E_ARGUMENT, "unknown algorithm '" + algo + "'");
    }
    res->stats["average_ride_s"] =
        res->plan.routes.empty() ? 0.0 : ctsp::average_ride(res->inst, res->plan);
    *out = res.release();
    return CTSP_OK;
  });
}

ctsp_status ctsp_result_summary(const ctsp_result* r, int* status, int* vehicles, int64_t* distance,
                                double* gap) {
  if (!r) return fail(CTSP_E_ARGUMENT, "null argument");
  if (status) *status = static_cast<int>(r->status);
  if (vehicles) *vehicles = r->plan.vehicle_count;
  if (distance) *distance = r->plan.total_distance;
  if (gap) *gap = r->plan.gap;
  return CTSP_OK;
}

ctsp_status ctsp_result_to_json(const ctsp_result* r, char** json) {
  if (!r || !json) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    ctsp::Json j = ctsp::plan_to_json(r->plan);
    j["algorithm"] = r->algorithm;
    j["status"] = ctsp::to_string(r->status);
    j["stats"] = r->stats;
    *json = copy_string(j.dump(2));
    return CTSP_OK;
  });
}

void ctsp_result_free(ctsp_result* r) { delete r; }

ctsp_status ctsp_enumerate(const ctsp_instance* inst, int keep_all_feasible, int threads,
                           char** jsonl) {
  if (!inst || !jsonl) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    ctsp::EnumerateOptions eo;
    eo.keep_all_feasible = keep_all_feasible != 0;
    eo.threads = threads > 0 ? threads : 1;
    const ctsp::RoutePool pool = ctsp::enumerate_routes(inst->inst, eo);
    std::ostringstream os;
    ctsp::write_pool_jsonl(pool, os);
    *jsonl = copy_string(os.str());
    return CTSP_OK;
  });
}

ctsp_status ctsp_cluster(const ctsp_instance* inst, const char* options_json, char** json) {
  if (!inst || !json) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Json o = parse_options(options_json);
    ctsp::ClusterOptions co;
    co.max_size = o.value("max_size", co.max_size);
    co.restarts = o.value("restarts", co.restarts);
    co.seed = o.value("seed", co.seed);
    co.threads = o.value("threads", co.threads);
    co.max_iterations = o.value("max_iterations", co.max_iterations);
    const ctsp::Clustering c = ctsp::cluster_commuters(inst->inst.commuters(), co);
    ctsp::Json centers = ctsp::Json::array();
    for (const ctsp::Point& p : c.centers) centers.push_back({p.x, p.y});
    const ctsp::Json j{{"clusters", c.members()},   {"centers", centers},
                       {"objective", c.objective},  {"seed", c.seed},
                       {"restarts", c.restarts},    {"iterations", c.iterations},
                       {"cycled", c.cycled},        {"history", c.history}};
    *json = copy_string(j.dump(2));
    return CTSP_OK;
  });
}

ctsp_status ctsp_validate(const ctsp_instance* inst, const char* plan_json, char** report) {
  if (!inst || !plan_json || !report) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Plan plan = ctsp::plan_from_json(ctsp::Json::parse(plan_json));
    const auto problems = ctsp::validate_plan(inst->inst, plan);
    *report = copy_string(ctsp::Json{{"valid", problems.empty()}, {"problems", problems}}.dump(2));
    return CTSP_OK;
  });
}

ctsp_status ctsp_cross_validate(const ctsp_instance* inst, const char* options_json, char** report) {
  if (!inst || !report) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Json o = parse_options(options_json);
    ctsp::BpaOptions bo;
    bo.threads = o.value("threads", 1);
    bo.use_cuts = o.value("use_cuts", bo.use_cuts);
    const ctsp::CrossReport c = ctsp::cross_validate(inst->inst, bo, o.value("brute_limit", 6));
    const ctsp::Json j{{"agree", c.agree},
                       {"rea", {c.rea_vehicles, c.rea_distance}},
                       {"bpa", {c.bpa_vehicles, c.bpa_distance}},
                       {"brute_checked", c.brute_checked},
                       {"brute", {c.brute_vehicles, c.brute_distance}},
                       {"problems", c.problems},
                       {"rea_s", c.rea_s},
                       {"bpa_s", c.bpa_s}};
    *report = copy_string(j.dump(2));
    return CTSP_OK;
  });
}

ctsp_status ctsp_bench(const char* config_json, const char* out_dir) {
  if (!config_json || !out_dir) return fail(CTSP_E_ARGUMENT, "null argument");
  return guarded([&] {
    const ctsp::Json j = parse_options(config_json);
    const ctsp::ExperimentConfig cfg = ctsp::experiment_config_from_json(j);
    ctsp::Instance population = [&] {
      if (!cfg.population.empty()) return ctsp::instance_from_json(read_file(cfg.population.c_str()));
      if (j.contains("population_spec")) {
        const ctsp::Json& spec = j["population_spec"];
        return ctsp::population_instance(
            ctsp::generate_population(ctsp::population_spec_from_json(spec)),
            ctsp::parameters_from_json(spec));
      }
      throw ctsp::Error("bench config needs 'population' or 'population_spec'");
    }();
    const ctsp::ExperimentResult r = ctsp::run_experiment(cfg, population);
    try {
      ctsp::write_experiment(r, out_dir);
    } catch (const std::exception& e) {
      throw IoFailure(e.what());
    }
    return CTSP_OK;
  });
}

}  // extern "C"
