#ifndef ORBITSTRATA_H
#define ORBITSTRATA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four match the CLI exit codes.
 */
typedef enum OsStatus {
  OS_STATUS_OK = 0,
  OS_STATUS_VERIFICATION_FAILED = 1,
  OS_STATUS_INPUT_ERROR = 2,
  OS_STATUS_CAP_EXCEEDED = 3,
  OS_STATUS_NULL_POINTER = 4,
  OS_STATUS_INVALID_UTF8 = 5,
  OS_STATUS_OUT_OF_RANGE = 6,
  OS_STATUS_INTERNAL = 7,
} OsStatus;

/**
 * Opaque loaded problem.
 */
typedef struct OsProblem OsProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads and validates a problem file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum OsStatus os_problem_load(const char *path, struct OsProblem **out);

/**
 * Parses and validates a problem document held in memory.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum OsStatus os_problem_from_json(const char *json, struct OsProblem **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `p` must come from a load function and not be used afterwards.
 */
void os_problem_free(struct OsProblem *p);

/**
 * Number of basis elements `q`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_problem_basis_len(const struct OsProblem *p, size_t *out);

/**
 * Number of strata jobs.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_problem_job_count(const struct OsProblem *p, size_t *out);

/**
 * Canonical text of the P̂ entry `(a, b)`, 0-based. P̂ is computed once per
 * handle.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_pmatrix_entry(const struct OsProblem *p, size_t a, size_t b, char **out);

/**
 * `pmatrix` report as JSON.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_pmatrix_report(const struct OsProblem *p, char **out);

/**
 * `relations` report as JSON.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_relations_report(const struct OsProblem *p, uint32_t max_degree, char **out);

/**
 * `stratum` report for job `job` as JSON. Returns
 * `OS_STATUS_VERIFICATION_FAILED` with the report when a check fails.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_stratum_report(const struct OsProblem *p, size_t job, char **out);

/**
 * `verify` report as JSON.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum OsStatus os_verify_report(const struct OsProblem *p, char **out);

/**
 * `classify` report for a comma-separated point.
 *
 * # Safety
 * `p` must be a live handle; `point` NUL-terminated; `out` writable.
 */
enum OsStatus os_classify_report(const struct OsProblem *p,
                                 const char *point,
                                 double tol,
                                 char **out);

/**
 * `probe` report for job `job`; `box_spec` is `lo:hi[,lo:hi...]`.
 *
 * # Safety
 * `p` must be a live handle; `box_spec` NUL-terminated; `out` writable.
 */
enum OsStatus os_probe_report(const struct OsProblem *p,
                              size_t job,
                              const char *box_spec,
                              size_t samples,
                              uint64_t seed,
                              char **out);

/**
 * Canonical form of `expr` over the comma-separated variables `vars` in
 * `Q(√d)`.
 *
 * # Safety
 * `expr` and `vars` must be NUL-terminated; `out` writable.
 */
enum OsStatus os_canonicalize(const char *expr, const char *vars, uint32_t d, char **out);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void os_string_free(char *s);

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call on the same thread.
 */
const char *os_last_error_message(void);

/**
 * Library version, static.
 */
const char *os_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBITSTRATA_H */
