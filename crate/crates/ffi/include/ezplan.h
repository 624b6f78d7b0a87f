#ifndef EZPLAN_H
#define EZPLAN_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every `ezp_*` call.
 */
typedef enum EzpStatus {
  EZP_STATUS_OK = 0,
  EZP_STATUS_NULL_POINTER = 1,
  EZP_STATUS_INVALID_ARGUMENT = 2,
  EZP_STATUS_IO = 3,
  EZP_STATUS_PARSE = 4,
  /**
   * Planning finished without a solution; the plan handle is still set.
   */
  EZP_STATUS_INFEASIBLE = 5,
  EZP_STATUS_PANIC = 6,
} EzpStatus;

typedef enum EzpWord {
  EZP_WORD_LSL = 0,
  EZP_WORD_RSR = 1,
  EZP_WORD_LSR = 2,
  EZP_WORD_RSL = 3,
  EZP_WORD_RLR = 4,
  EZP_WORD_LRL = 5,
} EzpWord;

/**
 * Opaque plan handle.
 */
typedef struct EzpPlan EzpPlan;

/**
 * Opaque scenario handle.
 */
typedef struct EzpScenario EzpScenario;

typedef struct EzpVerifyReport {
  bool passed;
  bool dynamics_ok;
  bool boundary_ok;
  bool domain_ok;
  bool ez_ok;
  double max_position_defect;
  double min_ez_slack;
  double duration;
} EzpVerifyReport;

typedef struct EzpConfiguration {
  double x;
  double y;
  double psi;
} EzpConfiguration;

/**
 * Shortest Dubins path summary. Turn parameters are angles in radians,
 * the straight parameter is a length.
 */
typedef struct EzpDubinsPath {
  enum EzpWord word;
  double params[3];
  double length;
} EzpDubinsPath;

typedef struct EzpZone {
  double x;
  double y;
  double r_max;
} EzpZone;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread. Owned by the library.
 */
const char *ezp_last_error(void);

/**
 * Load a scenario JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum EzpStatus ezp_scenario_load(const char *path, struct EzpScenario **out);

/**
 * Parse a scenario from a JSON string.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EzpStatus ezp_scenario_from_json(const char *json, struct EzpScenario **out);

/**
 * Random scenario on the unit square with the default generator settings
 * and the given zone radius.
 *
 * # Safety
 * `out` must be writable.
 */
enum EzpStatus ezp_scenario_generate(size_t n_zones,
                                     uint64_t seed,
                                     double r_max,
                                     struct EzpScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from this library not yet freed.
 */
void ezp_scenario_free(struct EzpScenario *scenario);

/**
 * Number of zones, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t ezp_scenario_zone_count(const struct EzpScenario *scenario);

/**
 * Run the planner for `max_iterations` iterations. The plan handle is
 * written on both `Ok` and `Infeasible`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum EzpStatus ezp_plan(const struct EzpScenario *scenario,
                        uint64_t max_iterations,
                        uint64_t seed,
                        struct EzpPlan **out);

/**
 * # Safety
 * `plan` must be null or a handle from this library not yet freed.
 */
void ezp_plan_free(struct EzpPlan *plan);

/**
 * # Safety
 * `plan` must be null or a live handle.
 */
bool ezp_plan_solved(const struct EzpPlan *plan);

/**
 * Transit time of the solution; `Infeasible` when unsolved.
 *
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum EzpStatus ezp_plan_cost(const struct EzpPlan *plan, double *out);

/**
 * Plan as a JSON string; release it with [`ezp_string_free`].
 *
 * # Safety
 * `plan` must be a live handle; `out` must be writable.
 */
enum EzpStatus ezp_plan_to_json(const struct EzpPlan *plan, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ezp_string_free(char *s);

/**
 * Integrate `plan` and check it against `scenario`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum EzpStatus ezp_verify(const struct EzpPlan *plan,
                          const struct EzpScenario *scenario,
                          double time_step,
                          struct EzpVerifyReport *out);

/**
 * Shortest Dubins path between two configurations.
 *
 * # Safety
 * `from` and `to` must be readable; `out` must be writable.
 */
enum EzpStatus ezp_dubins_shortest(const struct EzpConfiguration *from,
                                   const struct EzpConfiguration *to,
                                   double turn_radius,
                                   struct EzpDubinsPath *out);

/**
 * Whether `config` lies inside the obstacle of `zone`.
 *
 * # Safety
 * `config` and `zone` must be readable; `out` must be writable.
 */
enum EzpStatus ezp_in_engagement(const struct EzpConfiguration *config,
                                 const struct EzpZone *zone,
                                 bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EZPLAN_H */
