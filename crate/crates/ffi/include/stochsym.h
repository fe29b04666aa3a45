/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef STOCHSYM_H
#define STOCHSYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StochsymStatus {
  STOCHSYM_STATUS_OK = 0,
  STOCHSYM_STATUS_NULL_POINTER = 1,
  STOCHSYM_STATUS_INVALID_UTF8 = 2,
  STOCHSYM_STATUS_PARSE_ERROR = 3,
  STOCHSYM_STATUS_INVALID_INPUT = 4,
  STOCHSYM_STATUS_CAPABILITY = 5,
  STOCHSYM_STATUS_EVAL_ERROR = 6,
  STOCHSYM_STATUS_PANIC = 7,
} StochsymStatus;

/**
 * A canonical expression together with the variables it was parsed against.
 */
typedef struct StochsymExpr StochsymExpr;

typedef struct StochsymProblem StochsymProblem;

typedef struct StochsymReport StochsymReport;

/**
 * Zero-test and seeding overrides; negative or zero fields keep the file's values.
 */
typedef struct StochsymOptions {
  int64_t seed;
  double tol;
  int64_t samples;
} StochsymOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Owned by the library.
 */
const char *stochsym_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void stochsym_string_free(char *s);

/**
 * Parse and simplify `text`. `states` and `wiener` are comma-separated names.
 *
 * # Safety
 * String arguments must be valid NUL-terminated strings; `out` must be writable.
 */
enum StochsymStatus stochsym_expr_parse(const char *text,
                                        const char *states,
                                        const char *time,
                                        const char *wiener,
                                        struct StochsymExpr **out);

/**
 * # Safety
 * `e` must be null or a live handle.
 */
void stochsym_expr_free(struct StochsymExpr *e);

/**
 * Canonical printed form; free with `stochsym_string_free`.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum StochsymStatus stochsym_expr_to_string(const struct StochsymExpr *e, char **out);

/**
 * ∂e/∂var as a new handle.
 *
 * # Safety
 * `e` must be a live handle, `var` a valid string and `out` writable.
 */
enum StochsymStatus stochsym_expr_diff(const struct StochsymExpr *e,
                                       const char *var,
                                       struct StochsymExpr **out);

/**
 * Evaluate at `names[i] = values[i]`.
 *
 * # Safety
 * `names` and `values` must each hold `len` entries; `out` must be writable.
 */
enum StochsymStatus stochsym_expr_eval(const struct StochsymExpr *e,
                                       const char *const *names,
                                       const double *values,
                                       uintptr_t len,
                                       double *out);

/**
 * Problem from TOML text; `opts` may be null.
 *
 * # Safety
 * `toml` must be a valid string, `opts` null or valid, `out` writable.
 */
enum StochsymStatus stochsym_problem_from_toml(const char *toml,
                                               const struct StochsymOptions *opts,
                                               struct StochsymProblem **out);

/**
 * Problem from a TOML file or a JSON report; `opts` may be null.
 *
 * # Safety
 * `path` must be a valid string, `opts` null or valid, `out` writable.
 */
enum StochsymStatus stochsym_problem_load(const char *path,
                                          const struct StochsymOptions *opts,
                                          struct StochsymProblem **out);

/**
 * # Safety
 * `p` must be null or a live handle.
 */
void stochsym_problem_free(struct StochsymProblem *p);

/**
 * Run a command ("convert", "check", "determining", "reduce", "solve",
 * "verify-change", "tau-check", "unal") and return its report.
 *
 * # Safety
 * `p` must be a live handle, `command` a valid string and `out` writable.
 */
enum StochsymStatus stochsym_run(const struct StochsymProblem *p,
                                 const char *command,
                                 struct StochsymReport **out);

/**
 * The command-line exit code for this report: 0 positive verdict, 1 negative.
 *
 * # Safety
 * `r` must be a live handle.
 */
int32_t stochsym_report_verdict(const struct StochsymReport *r);

/**
 * Text report; free with `stochsym_string_free`.
 *
 * # Safety
 * `r` must be a live handle.
 */
char *stochsym_report_text(const struct StochsymReport *r);

/**
 * JSON report; free with `stochsym_string_free`.
 *
 * # Safety
 * `r` must be a live handle.
 */
char *stochsym_report_json(const struct StochsymReport *r);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
void stochsym_report_free(struct StochsymReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOCHSYM_H */
