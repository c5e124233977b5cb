#ifndef FACLOC_H
#define FACLOC_H

/* Generated by cbindgen from facloc-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum FaclocCode {
  FACLOC_CODE_OK = 0,
  FACLOC_CODE_NULL_POINTER = 1,
  FACLOC_CODE_INVALID_UTF8 = 2,
  FACLOC_CODE_IO = 3,
  FACLOC_CODE_PARSE_FAILED = 4,
  FACLOC_CODE_INVALID_ARGUMENT = 5,
  FACLOC_CODE_SOLVE_FAILED = 6,
  FACLOC_CODE_TOO_LARGE = 7,
  FACLOC_CODE_PANIC = 8,
} FaclocCode;

/**
 * Outcome of a solve, mirrored from the solver's status.
 */
typedef enum FaclocSolveStatus {
  FACLOC_SOLVE_STATUS_OPTIMAL = 0,
  FACLOC_SOLVE_STATUS_GAP_LIMIT = 1,
  FACLOC_SOLVE_STATUS_TIME_LIMIT = 2,
  FACLOC_SOLVE_STATUS_INFEASIBLE = 3,
} FaclocSolveStatus;

/**
 * Opaque problem instance handle.
 */
typedef struct FaclocInstance FaclocInstance;

/**
 * Opaque solve result handle.
 */
typedef struct FaclocResult FaclocResult;

/**
 * Exact-solver options; obtain defaults from
 * `facloc_solver_options_default` and override fields as needed.
 */
typedef struct FaclocSolverOptions {
  /**
   * Relative optimality gap tolerance.
   */
  double gap_tol;
  /**
   * Wall-clock limit in seconds; `<= 0` means none.
   */
  double time_limit;
  /**
   * Node limit; `<= 0` means none.
   */
  int64_t node_limit;
  /**
   * Nonzero: epigraph covers fixed plus assignment cost instead of the
   * split form.
   */
  int32_t full_cut_mode;
} FaclocSolverOptions;

/**
 * Kernel-search options; obtain defaults from
 * `facloc_kernel_options_default`.
 */
typedef struct FaclocKernelOptions {
  /**
   * `<= 0` picks `max(2, ceil(n/10))`.
   */
  int64_t bucket_size;
  int64_t max_bucket_passes;
  int32_t allow_removal;
  uint32_t removal_patience;
  int32_t fixing_variant;
  /**
   * Per-restricted-MILP budget in seconds; `<= 0` means none.
   */
  double milp_time_limit;
} FaclocKernelOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *facloc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *facloc_version(void);

/**
 * Load an instance from a file (.cap ORLIB, .fl native).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum FaclocCode facloc_instance_from_file(const char *path, struct FaclocInstance **out);

/**
 * Parse an instance from native-format text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be valid.
 */
enum FaclocCode facloc_instance_parse_native(const char *text, struct FaclocInstance **out);

/**
 * Parse an instance from ORLIB cap-format text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be valid.
 */
enum FaclocCode facloc_instance_parse_orlib(const char *text, struct FaclocInstance **out);

/**
 * Generate a reproducible random instance. `capacitated != 0` requires
 * `ratio > 1` (total capacity over total demand).
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum FaclocCode facloc_instance_generate(uint64_t seed,
                                         size_t n_facilities,
                                         size_t n_customers,
                                         int32_t capacitated,
                                         double ratio,
                                         struct FaclocInstance **out);

/**
 * Append a recourse (dummy) facility with the given penalty, producing a new
 * handle. Pass a non-finite or non-positive penalty to use the recommended
 * one.
 *
 * # Safety
 * `inst` must be a live handle from this library; `out` must be valid.
 */
enum FaclocCode facloc_instance_add_recourse(const struct FaclocInstance *inst,
                                             double penalty,
                                             struct FaclocInstance **out);

/**
 * Number of facilities (including any recourse column); 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t facloc_instance_facilities(const struct FaclocInstance *inst);

/**
 * Number of customers; 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t facloc_instance_customers(const struct FaclocInstance *inst);

/**
 * Serialize an instance to native-format text. Free the string with
 * `facloc_string_free`.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid.
 */
enum FaclocCode facloc_instance_emit_native(const struct FaclocInstance *inst, char **out);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and not
 * yet freed.
 */
void facloc_string_free(char *s);

/**
 * Free an instance handle.
 *
 * # Safety
 * `inst` must be null or a live handle; it must not be used afterwards.
 */
void facloc_instance_free(struct FaclocInstance *inst);

struct FaclocSolverOptions facloc_solver_options_default(void);

struct FaclocKernelOptions facloc_kernel_options_default(void);

/**
 * Solve exactly by branch-and-cut. `options` may be null for defaults.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid; `options` must be null
 * or point to a valid options struct.
 */
enum FaclocCode facloc_solve_benders(const struct FaclocInstance *inst,
                                     const struct FaclocSolverOptions *options,
                                     struct FaclocResult **out);

/**
 * Run the kernel-search heuristic. Null options mean defaults.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid; option pointers must be
 * null or valid.
 */
enum FaclocCode facloc_solve_kernel(const struct FaclocInstance *inst,
                                    const struct FaclocSolverOptions *solver_options,
                                    const struct FaclocKernelOptions *kernel_options,
                                    struct FaclocResult **out);

/**
 * Enumerate every selection (at most 22 non-dummy facilities).
 *
 * # Safety
 * `inst` must be a live handle; `out` must be valid.
 */
enum FaclocCode facloc_brute_force(const struct FaclocInstance *inst, struct FaclocResult **out);

/**
 * Solve status of a result; `Infeasible` for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
enum FaclocSolveStatus facloc_result_status(const struct FaclocResult *res);

/**
 * Incumbent cost; NaN when there is none.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double facloc_result_cost(const struct FaclocResult *res);

/**
 * Proven lower bound; NaN for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double facloc_result_lower_bound(const struct FaclocResult *res);

/**
 * Relative gap `(cost - bound) / max(1, |cost|)`; NaN for null.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double facloc_result_gap(const struct FaclocResult *res);

/**
 * Nodes processed.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
uint64_t facloc_result_nodes(const struct FaclocResult *res);

/**
 * Cuts generated.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
uint64_t facloc_result_cuts(const struct FaclocResult *res);

/**
 * Wall time of the solve in seconds.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double facloc_result_wall_time(const struct FaclocResult *res);

/**
 * Length of the selection vector (number of facilities), 0 when the result
 * carries no incumbent.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
size_t facloc_result_selection_len(const struct FaclocResult *res);

/**
 * Copy the 0/1 selection into `buf` (capacity `len`); fails when the buffer
 * is too small or no incumbent exists.
 *
 * # Safety
 * `res` must be a live handle; `buf` must point to at least `len` writable
 * bytes.
 */
enum FaclocCode facloc_result_selection(const struct FaclocResult *res, uint8_t *buf, size_t len);

/**
 * Free a result handle.
 *
 * # Safety
 * `res` must be null or a live handle; it must not be used afterwards.
 */
void facloc_result_free(struct FaclocResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FACLOC_H */
