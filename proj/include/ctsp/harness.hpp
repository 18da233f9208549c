#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ctsp/bnp.hpp"
#include "ctsp/io.hpp"
#include "ctsp/model.hpp"

namespace ctsp {

// Normal component truncated to [low, high], in seconds since midnight.
struct TimeComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
  double low = 0.0;
  double high = 86400.0;
};

using TimeMixture = std::vector<TimeComponent>;

TimeMixture default_arrivals();    // peaks at 7:00 and 8:15
TimeMixture default_departures();  // peaks at 16:30 and 17:45

// Draws a time and reports the component it came from.
std::pair<double, int> sample_time(const TimeMixture& mix, std::mt19937_64& rng);

struct PopulationSpec {
  int count = 60;
  double extent_m = 8000.0;  // homes uniform in [0, extent]^2
  std::vector<Point> workplaces{{4000.0, 4000.0}};
  TimeMixture arrivals = default_arrivals();
  TimeMixture departures = default_departures();
  double speed_mps = 10.0;
  std::uint64_t seed = 1;
};

PopulationSpec population_spec_from_json(const Json& j);
Json population_spec_to_json(const PopulationSpec& s);

struct Population {
  std::vector<Point> locations;  // homes first, then workplaces
  std::vector<Commuter> commuters;
  double speed_mps = 10.0;
};

Population generate_population(const PopulationSpec& spec);
Instance population_instance(const Population& pop, const Parameters& params);

// Problems found in a plan; empty when it covers every trip once, uses the
// same drivers in both directions, has an even route count and only
// feasible, valid routes whose distances add up.
std::vector<std::string> validate_plan(const Instance& inst, const Plan& plan);

// Mean ride duration over all trips of a plan, and over direct trips.
double average_ride(const Instance& inst, const Plan& plan);
double average_direct_ride(const Instance& inst);

struct BruteForceResult {
  bool found = false;
  int vehicles = 0;
  Meters distance = 0;
  std::vector<Route> routes;
};

// Exhaustive plan search over all rider partitions, driver choices and stop
// orders (small instances only).
BruteForceResult brute_force_plan(const Instance& inst, int max_commuters = 6);

struct CrossReport {
  int rea_vehicles = 0, bpa_vehicles = 0, brute_vehicles = -1;
  Meters rea_distance = 0, bpa_distance = 0, brute_distance = -1;
  bool brute_checked = false;
  bool agree = false;
  std::vector<std::string> problems;  // validity findings and mismatches
  double rea_s = 0.0, bpa_s = 0.0;
};

CrossReport cross_validate(const Instance& inst, const BpaOptions& bpa = {},
                           int brute_limit = 6);

struct RunRecord {
  std::string cell;  // grid cell label
  int cluster = 0;
  int cluster_size = 0;
  int capacity = 0;
  double delta_s = 0;
  double detour_ratio = 0;
  std::string algorithm;
  std::string status;
  long columns = 0;
  long inbound_edges = 0;
  long outbound_edges = 0;
  long tree_nodes = 0;
  int vehicle_count = 0;
  Meters total_distance = 0;
  double optimality_gap = 0;
  double integrality_gap = 0;
  double average_ride_s = 0;
  double rmp_convergence_s = 0;
  double root_solution_s = 0;
  double best_solution_s = 0;
  double total_s = 0;
  std::string error;
};

extern const char* const kRunRecordHeader;
void write_csv_row(std::ostream& os, const RunRecord& r);

struct SolveSettings {
  std::string algorithm = "rea";  // rea | bpa | heuristic
  double time_limit_s = 3600;
  double t_rmp_s = 480;
  double t_mip_s = 120;
  bool relax_forbidden = false;
  int threads = 1;
};

// Solves one instance and validates the plan; failures land in `error`.
RunRecord solve_and_record(const Instance& inst, const SolveSettings& s, Plan* plan = nullptr);

struct ExperimentConfig {
  std::string population;  // instance/population JSON path
  std::vector<std::string> algorithms{"rea"};
  std::vector<int> capacities{4};
  std::vector<int> cluster_sizes{0};  // 0: no clustering
  std::vector<double> deltas_s{600};
  std::vector<double> detour_ratios{0.5};
  int restarts = 100;
  std::uint64_t seed = 1;
  SolveSettings solve;
  int workers = 1;
};

ExperimentConfig experiment_config_from_json(const Json& j);

struct CellSummary {
  std::string cell;
  std::string algorithm;
  int capacity = 0;
  int cluster_size = 0;
  double delta_s = 0;
  double detour_ratio = 0;
  int commuters = 0;
  int vehicle_count = 0;
  Meters total_distance = 0;
  double average_ride_s = 0;
  double vehicle_pct = 0;   // of the no-sharing count
  double distance_pct = 0;  // of the no-sharing distance
  int failures = 0;
};

extern const char* const kCellSummaryHeader;
void write_csv_row(std::ostream& os, const CellSummary& s);

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<CellSummary> cells;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Instance& population);
// Writes runs.csv, cells.csv and one CSV per swept parameter into `dir`.
void write_experiment(const ExperimentResult& r, const std::string& dir);

}  // namespace ctsp
