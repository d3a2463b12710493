#ifndef TWOSTROKE_H
#define TWOSTROKE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TS_MODE_ENGINE 1

#define TS_MODE_COOLER 2

#define TS_MODE_ACCELERATOR 4

#define TS_MODE_DEGENERATE 8

#define TS_LP_OPTIMAL 0

#define TS_LP_INFEASIBLE 1

#define TS_LP_GUARD_EXCEEDED 2

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  /**
   * Invalid parameters, shapes or buffer sizes.
   */
  TS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Infeasible catalyst, singular system or no engine regime.
   */
  TS_STATUS_INFEASIBLE = 3,
  TS_STATUS_GUARD_EXCEEDED = 4,
  TS_STATUS_INTERNAL = 5,
} TsStatus;

typedef struct TsBirkhoff TsBirkhoff;

/**
 * Qubit hot and cold baths with fixed frequencies and temperatures.
 */
typedef struct TsEngine TsEngine;

typedef struct TsLpSolution TsLpSolution;

typedef struct TsCycleReport {
  double work;
  double heat_hot;
  double heat_cold;
  /**
   * NaN when `has_efficiency` is 0.
   */
  double efficiency;
  int32_t has_efficiency;
  /**
   * Bitwise OR of the `TS_MODE_*` flags.
   */
  uint32_t modes;
} TsCycleReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *ts_last_error_message(void);

/**
 * Gibbs populations of `levels[0..n]` at inverse temperature `beta`.
 */
enum TsStatus ts_gibbs_populations(const double *levels,
                                   size_t n,
                                   double beta,
                                   double *out,
                                   size_t out_len);

enum TsStatus ts_engine_new(double beta_h,
                            double beta_c,
                            double omega_h,
                            double omega_c,
                            struct TsEngine **out);

void ts_engine_free(struct TsEngine *engine);

/**
 * The swap of `|01>` and `|10>` without a catalyst. Reports whatever the
 * stroke does, engine or not.
 */
enum TsStatus ts_engine_otto_report(const struct TsEngine *engine, struct TsCycleReport *out);

/**
 * Best non-catalytic efficiency over all 24 permutations; `Infeasible`
 * when none produces work.
 */
enum TsStatus ts_engine_optimal_efficiency(const struct TsEngine *engine, double *out);

/**
 * Simple permutation with `m` hot and `n` cold swaps on an `m + n`-level
 * catalyst. `catalyst_out` (length `catalyst_len >= m + n`) and
 * `delta_p_out` may be NULL.
 */
enum TsStatus ts_engine_simple_report(const struct TsEngine *engine,
                                      size_t m,
                                      size_t n,
                                      struct TsCycleReport *out,
                                      double *catalyst_out,
                                      size_t catalyst_len,
                                      double *delta_p_out);

enum TsStatus ts_delta_p_closed_form(size_t m, size_t n, double a_h, double a_c, double *out);

/**
 * Stationary catalyst of the simple permutation from the linear system.
 * `p_out` must hold `m + n` values.
 */
enum TsStatus ts_solve_catalyst(size_t m,
                                size_t n,
                                double a_h,
                                double a_c,
                                double *p_out,
                                size_t p_len,
                                double *delta_p_out);

/**
 * LP bound on work for `catalyst ⊗ hot ⊗ cold`, with the catalyst in
 * state `catalyst[0..d_s]` and the baths thermal. A solution whose
 * status is guard-exceeded is still returned, together with
 * `GuardExceeded`.
 */
enum TsStatus ts_lp_solve(const double *hot_levels,
                          size_t d_h,
                          const double *cold_levels,
                          size_t d_c,
                          const double *catalyst,
                          size_t d_s,
                          double beta_h,
                          double beta_c,
                          struct TsLpSolution **out);

/**
 * NaN for a NULL handle.
 */
double ts_lp_value(const struct TsLpSolution *sol);

/**
 * One of `TS_LP_*`, or -1 for a NULL handle.
 */
int32_t ts_lp_status(const struct TsLpSolution *sol);

size_t ts_lp_num_terms(const struct TsLpSolution *sol);

/**
 * Weight and permutation image of mixture term `k`; `image_out` must
 * hold the total dimension.
 */
enum TsStatus ts_lp_term(const struct TsLpSolution *sol,
                         size_t k,
                         size_t *image_out,
                         size_t image_len,
                         double *weight_out);

void ts_lp_free(struct TsLpSolution *sol);

/**
 * Decomposes the row-major `n x n` bistochastic matrix `entries` into
 * weighted permutations.
 */
enum TsStatus ts_birkhoff_decompose(const double *entries, size_t n, struct TsBirkhoff **out);

size_t ts_birkhoff_num_terms(const struct TsBirkhoff *b);

enum TsStatus ts_birkhoff_term(const struct TsBirkhoff *b,
                               size_t k,
                               size_t *image_out,
                               size_t image_len,
                               double *weight_out);

void ts_birkhoff_free(struct TsBirkhoff *b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWOSTROKE_H */
