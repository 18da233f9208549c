// Command-line front end; talks to the library only through ctsp.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ctsp/ctsp.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  int code;
};

void check(ctsp_status s) {
  if (s != CTSP_OK) {
    std::cerr << "error: " << ctsp_last_error() << '\n';
    throw Failure{static_cast<int>(s)};
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ctsp_string_free(s);
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << '\n';
    throw Failure{CTSP_E_IO};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot write " << path << '\n';
    throw Failure{CTSP_E_IO};
  }
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

class InstanceHandle {
 public:
  explicit InstanceHandle(ctsp_instance* p = nullptr) : p_(p) {}
  InstanceHandle(const InstanceHandle&) = delete;
  InstanceHandle& operator=(const InstanceHandle&) = delete;
  ~InstanceHandle() { ctsp_instance_free(p_); }
  ctsp_instance** out() { return &p_; }
  ctsp_instance* get() const { return p_; }

 private:
  ctsp_instance* p_;
};

struct ParamOverrides {
  std::optional<int> capacity;
  std::optional<double> delta_s;
  std::optional<double> detour_ratio;
  std::optional<double> service_s;
  std::optional<double> multiplier;

  void attach(CLI::App* app) {
    app->add_option("--capacity,-K", capacity, "vehicle capacity");
    app->add_option("--delta", delta_s, "time-window half width in seconds");
    app->add_option("--detour-ratio,-R", detour_ratio, "maximum relative detour");
    app->add_option("--service", service_s, "service time per stop in seconds");
    app->add_option("--fixed-cost-multiplier", multiplier, "vehicle cost multiplier");
  }

  json to_json() const {
    json j = json::object();
    if (capacity) j["capacity"] = *capacity;
    if (delta_s) j["delta_s"] = *delta_s;
    if (detour_ratio) j["detour_ratio"] = *detour_ratio;
    if (service_s) j["service_s"] = *service_s;
    if (multiplier) j["fixed_cost_multiplier"] = *multiplier;
    return j;
  }
};

void load(const std::string& path, const ParamOverrides& p, InstanceHandle& out) {
  InstanceHandle raw;
  check(ctsp_instance_load(path.c_str(), raw.out()));
  check(ctsp_instance_with_parameters(raw.get(), p.to_json().dump().c_str(), out.out()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commuter ride-sharing: instance generation, exact and heuristic solvers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ctsp_version()));

  std::string instance_path, out_path, plan_path, spec_path, grid_path, out_dir;
  ParamOverrides params;
  double time_limit = 3600, t_rmp = 480, t_mip = 120;
  int threads = 1, max_size = 50, restarts = 100, count = -1;
  long long seed = -1;
  bool relax = false, no_cuts = false, keep_all = false;

  auto* gen = app.add_subcommand("gen", "generate a random commuter population");
  gen->add_option("--spec", spec_path, "population spec JSON")->check(CLI::ExistingFile);
  gen->add_option("--count,-n", count, "number of commuters");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out,-o", out_path, "instance file to write")->required();
  params.attach(gen);

  auto add_solver = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--instance,-i", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out,-o", out_path, "plan JSON to write (default stdout)");
    s->add_option("--threads,-t", threads, "worker threads")->check(CLI::PositiveNumber);
    params.attach(s);
    return s;
  };
  auto* rea = add_solver("solve-rea", "exact: enumerate all best routes, then solve the MIP");
  rea->add_option("--time-limit", time_limit, "MIP time budget in seconds");
  auto* bpa = add_solver("solve-bpa", "exact: branch-and-price");
  bpa->add_option("--time-limit", time_limit, "wall-clock limit in seconds");
  bpa->add_flag("--no-cuts", no_cuts, "skip the parity and objective cuts");
  auto* heur = add_solver("heuristic", "root column generation followed by a pool MIP");
  heur->add_option("--t-rmp", t_rmp, "column generation budget in seconds");
  heur->add_option("--t-mip", t_mip, "MIP budget in seconds");
  heur->add_flag("--relax-forbidden", relax, "skip the forbidden-path loop in pricing");

  auto* en = app.add_subcommand("enumerate", "write the route pool as JSON lines");
  en->add_option("--instance,-i", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  en->add_option("--out,-o", out_path, "output file (default stdout)");
  en->add_option("--threads,-t", threads, "worker threads")->check(CLI::PositiveNumber);
  en->add_flag("--keep-all-feasible", keep_all, "store every feasible ordering");
  params.attach(en);

  auto* cl = app.add_subcommand("cluster", "split commuters into capacity-limited clusters");
  cl->add_option("--instance,-i", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  cl->add_option("--max-size,-N", max_size, "maximum cluster size")->check(CLI::PositiveNumber);
  cl->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);
  cl->add_option("--seed", seed, "random seed");
  cl->add_option("--threads,-t", threads, "worker threads")->check(CLI::PositiveNumber);
  cl->add_option("--out-dir,-o", out_dir, "directory for cluster instances")->required();

  auto* bench = app.add_subcommand("bench", "run a parameter grid experiment");
  bench->add_option("--grid,-g", grid_path, "experiment config JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out,-o", out_dir, "output directory")->required();

  auto* val = app.add_subcommand("validate", "check a plan against an instance");
  val->add_option("--instance,-i", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  val->add_option("--plan,-p", plan_path, "plan JSON")->required()->check(CLI::ExistingFile);
  params.attach(val);

  auto* cross = app.add_subcommand("cross-validate", "compare REA, BPA and brute force");
  cross->add_option("--instance,-i", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  cross->add_option("--threads,-t", threads, "worker threads")->check(CLI::PositiveNumber);
  params.attach(cross);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      json spec = spec_path.empty() ? json::object() : json::parse(read_text(spec_path));
      if (count >= 0) spec["count"] = count;
      if (seed >= 0) spec["seed"] = seed;
      spec.update(params.to_json());
      InstanceHandle inst;
      check(ctsp_instance_generate(spec.dump().c_str(), inst.out()));
      check(ctsp_instance_save(inst.get(), out_path.c_str()));
      return 0;
    }

    for (auto [cmd, algo] : {std::pair{rea, "rea"}, {bpa, "bpa"}, {heur, "heuristic"}}) {
      if (!cmd->parsed()) continue;
      InstanceHandle inst;
      load(instance_path, params, inst);
      const json opts{{"threads", threads}, {"time_limit_s", time_limit}, {"t_rmp_s", t_rmp},
                      {"t_mip_s", t_mip},   {"relax_forbidden", relax},   {"use_cuts", !no_cuts}};
      ctsp_result* res = nullptr;
      check(ctsp_solve(inst.get(), algo, opts.dump().c_str(), &res));
      char* text = nullptr;
      const ctsp_status s = ctsp_result_to_json(res, &text);
      int status = 2, vehicles = 0;
      int64_t distance = 0;
      double gap = 0;
      ctsp_result_summary(res, &status, &vehicles, &distance, &gap);
      ctsp_result_free(res);
      check(s);
      emit(take(text), out_path);
      std::cerr << algo << ": vehicles " << vehicles << ", distance " << distance << " m, gap "
                << gap << '\n';
      return status == 2 ? CTSP_E_NO_SOLUTION : 0;
    }

    if (en->parsed()) {
      InstanceHandle inst;
      load(instance_path, params, inst);
      char* text = nullptr;
      check(ctsp_enumerate(inst.get(), keep_all ? 1 : 0, threads, &text));
      emit(take(text), out_path);
      return 0;
    }

    if (cl->parsed()) {
      InstanceHandle inst;
      check(ctsp_instance_load(instance_path.c_str(), inst.out()));
      json opts{{"max_size", max_size}, {"restarts", restarts}, {"threads", threads}};
      if (seed >= 0) opts["seed"] = seed;
      char* text = nullptr;
      check(ctsp_cluster(inst.get(), opts.dump().c_str(), &text));
      json manifest = json::parse(take(text));
      fs::create_directories(out_dir);
      json files = json::array();
      int index = 0;
      for (const auto& members : manifest["clusters"]) {
        const std::vector<int> ids = members.get<std::vector<int>>();
        InstanceHandle sub;
        check(ctsp_instance_subset(inst.get(), ids.data(), static_cast<int>(ids.size()), sub.out()));
        const std::string name = "cluster_" + std::to_string(index++) + ".json";
        check(ctsp_instance_save(sub.get(), (fs::path(out_dir) / name).string().c_str()));
        files.push_back({{"file", name}, {"commuters", ids}});
      }
      manifest["files"] = files;
      manifest["source"] = instance_path;
      emit(manifest.dump(2), (fs::path(out_dir) / "manifest.json").string());
      return 0;
    }

    if (bench->parsed()) {
      json cfg = json::parse(read_text(grid_path));
      if (cfg.contains("population")) {
        fs::path p = cfg["population"].get<std::string>();
        if (p.is_relative()) p = fs::path(grid_path).parent_path() / p;
        cfg["population"] = p.string();
      }
      check(ctsp_bench(cfg.dump().c_str(), out_dir.c_str()));
      return 0;
    }

    if (val->parsed()) {
      InstanceHandle inst;
      load(instance_path, params, inst);
      char* text = nullptr;
      check(ctsp_validate(inst.get(), read_text(plan_path).c_str(), &text));
      const std::string report = take(text);
      emit(report, "");
      return json::parse(report)["valid"].get<bool>() ? 0 : 1;
    }

    if (cross->parsed()) {
      InstanceHandle inst;
      load(instance_path, params, inst);
      char* text = nullptr;
      check(ctsp_cross_validate(inst.get(), json{{"threads", threads}}.dump().c_str(), &text));
      const std::string report = take(text);
      emit(report, "");
      return json::parse(report)["agree"].get<bool>() ? 0 : 1;
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
