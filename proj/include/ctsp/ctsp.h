#ifndef CTSP_CTSP_H
#define CTSP_CTSP_H

#include <stdint.h>

#if defined(_WIN32)
#  if defined(CTSP_BUILDING_LIBRARY)
#    define CTSP_API __declspec(dllexport)
#  else
#    define CTSP_API __declspec(dllimport)
#  endif
#else
#  define CTSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctsp_status {
  CTSP_OK = 0,
  CTSP_E_ARGUMENT = 1, /* null pointer, unknown name, bad option value */
  CTSP_E_IO = 2,       /* file could not be read or written */
  CTSP_E_FORMAT = 3,   /* malformed JSON or inconsistent instance */
  CTSP_E_NO_SOLUTION = 4,
  CTSP_E_INTERNAL = 5
} ctsp_status;

typedef struct ctsp_instance ctsp_instance;
typedef struct ctsp_result ctsp_result;

/* Message of the last failing call on this thread ("" when none). */
CTSP_API const char* ctsp_last_error(void);
CTSP_API const char* ctsp_version(void);

/* Strings returned through char** outputs are owned by the caller. */
CTSP_API void ctsp_string_free(char* s);

/* ---- instances ---------------------------------------------------------- */

CTSP_API ctsp_status ctsp_instance_load(const char* path, ctsp_instance** out);
CTSP_API ctsp_status ctsp_instance_parse(const char* json, ctsp_instance** out);
/* Random population; spec keys: count, extent_m, workplaces, arrivals,
   departures, speed_mps, seed, plus any parameter key. */
CTSP_API ctsp_status ctsp_instance_generate(const char* spec_json, ctsp_instance** out);
/* Copy with parameters (capacity, delta_s, detour_ratio, service_s,
   fixed_cost_multiplier) overridden by the given JSON object. */
CTSP_API ctsp_status ctsp_instance_with_parameters(const ctsp_instance* inst,
                                                   const char* params_json,
                                                   ctsp_instance** out);
/* Copy restricted to the listed commuters, renumbered 0..count-1. */
CTSP_API ctsp_status ctsp_instance_subset(const ctsp_instance* inst, const int* commuters,
                                          int count, ctsp_instance** out);
CTSP_API ctsp_status ctsp_instance_commuters(const ctsp_instance* inst, int* n);
CTSP_API ctsp_status ctsp_instance_to_json(const ctsp_instance* inst, char** json);
CTSP_API ctsp_status ctsp_instance_save(const ctsp_instance* inst, const char* path);
CTSP_API void ctsp_instance_free(ctsp_instance* inst);

/* ---- solving ------------------------------------------------------------ */

/* algorithm: "rea", "bpa" or "heuristic". options_json may be NULL; keys:
   time_limit_s, threads, t_rmp_s, t_mip_s, relax_forbidden, use_cuts,
   fixed_cost, mip_budget_s. */
CTSP_API ctsp_status ctsp_solve(const ctsp_instance* inst, const char* algorithm,
                                const char* options_json, ctsp_result** out);
/* status: 0 optimal, 1 time limit, 2 no solution. */
CTSP_API ctsp_status ctsp_result_summary(const ctsp_result* r, int* status, int* vehicles,
                                         int64_t* distance, double* gap);
/* Plan plus solver statistics. */
CTSP_API ctsp_status ctsp_result_to_json(const ctsp_result* r, char** json);
CTSP_API void ctsp_result_free(ctsp_result* r);

/* ---- tools -------------------------------------------------------------- */

/* Route pool as JSON lines, followed by nothing else. */
CTSP_API ctsp_status ctsp_enumerate(const ctsp_instance* inst, int keep_all_feasible,
                                    int threads, char** jsonl);
/* Clusters of commuter homes; options: max_size, restarts, seed, threads.
   Output: {"clusters": [[ids...]...], "objective", "seed", "iterations"}. */
CTSP_API ctsp_status ctsp_cluster(const ctsp_instance* inst, const char* options_json,
                                  char** json);
/* Validity report {"valid": bool, "problems": [...]} of a plan JSON. */
CTSP_API ctsp_status ctsp_validate(const ctsp_instance* inst, const char* plan_json,
                                   char** report);
/* REA, BPA and (small instances) brute force on one instance. */
CTSP_API ctsp_status ctsp_cross_validate(const ctsp_instance* inst, const char* options_json,
                                         char** report);
/* Grid experiment from a config JSON; CSV files go to out_dir. */
CTSP_API ctsp_status ctsp_bench(const char* config_json, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
