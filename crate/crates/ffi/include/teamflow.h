#ifndef TEAMFLOW_H
#define TEAMFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which operator to solve or evaluate.
 */
typedef enum TfMode {
  TF_MODE_TEAM = 0,
  TF_MODE_NE = 1,
  TF_MODE_POTENTIAL = 2,
} TfMode;

/**
 * Result code of every fallible call.
 */
typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_INPUT = 2,
  TF_STATUS_DIVERGENCE = 3,
  TF_STATUS_NOT_CONVERGED = 4,
  TF_STATUS_BUFFER_SIZE = 5,
  TF_STATUS_PANIC = 6,
} TfStatus;

/**
 * Opaque scenario handle.
 */
typedef struct TfScenario TfScenario;

/**
 * Summary of one solve. The profile itself goes to the caller's buffer.
 */
typedef struct TfSolveInfo {
  double cost;
  double residual;
  size_t iterations;
  bool converged;
  double step_size;
} TfSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tf_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next library call on the same thread.
 */
const char *tf_last_error(void);

/**
 * Parses and validates a scenario from JSON text. `*out` is NULL on failure.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum TfStatus tf_scenario_from_json(const char *json, struct TfScenario **out);

/**
 * Loads one of the scenarios shipped with the library by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum TfStatus tf_scenario_bundled(const char *name, struct TfScenario **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sc` must come from this library and not be used afterwards.
 */
void tf_scenario_free(struct TfScenario *sc);

/**
 * Number of decision makers.
 *
 * # Safety
 * `sc` must be a live handle and `out` writable.
 */
enum TfStatus tf_scenario_num_sources(const struct TfScenario *sc, size_t *out);

/**
 * Length of a flat profile (total number of paths).
 *
 * # Safety
 * `sc` must be a live handle and `out` writable.
 */
enum TfStatus tf_scenario_num_paths(const struct TfScenario *sc, size_t *out);

/**
 * Sets `rho` of the 0-based `edge`. The handle is unchanged on failure.
 *
 * # Safety
 * `sc` must be a live handle not shared with another thread during the call.
 */
enum TfStatus tf_scenario_set_rho(struct TfScenario *sc, size_t edge, double value);

/**
 * Runs the projected dynamics from the uniform split and writes the final
 * profile to `profile` (length `len`). A run that ends without meeting the
 * tolerance still fills the outputs and returns `NOT_CONVERGED`.
 *
 * # Safety
 * `sc` must be a live handle, `profile` must hold `len` doubles and `info`
 * may be NULL or writable.
 */
enum TfStatus tf_solve(const struct TfScenario *sc,
                       uint32_t mode,
                       double *profile,
                       size_t len,
                       struct TfSolveInfo *info);

/**
 * Team cost of a flat profile.
 *
 * # Safety
 * `sc` must be a live handle, `profile` must hold `len` doubles, `out` writable.
 */
enum TfStatus tf_team_cost(const struct TfScenario *sc,
                           const double *profile,
                           size_t len,
                           double *out);

/**
 * Natural-map residual of the variational inequality for `mode` at a profile.
 *
 * # Safety
 * `sc` must be a live handle, `profile` must hold `len` doubles, `out` writable.
 */
enum TfStatus tf_vi_residual(const struct TfScenario *sc,
                             uint32_t mode,
                             const double *profile,
                             size_t len,
                             double *out);

/**
 * Deviation report between the team optimum and the equilibrium as a JSON
 * object. Free the string with [`tf_string_free`].
 *
 * # Safety
 * `sc` must be a live handle and `out` writable.
 */
enum TfStatus tf_deviation_json(const struct TfScenario *sc, char **out);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEAMFLOW_H */
