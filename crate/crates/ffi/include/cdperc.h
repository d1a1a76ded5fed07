#ifndef CDPERC_H
#define CDPERC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdpercPlanarVariant {
  CDPERC_PLANAR_VARIANT_CUBIC = 0,
  CDPERC_PLANAR_VARIANT_MATCHING_SQUARE = 1,
} CdpercPlanarVariant;

typedef enum CdpercStatus {
  CDPERC_STATUS_OK = 0,
  CDPERC_STATUS_NULL_POINTER = 1,
  CDPERC_STATUS_INVALID_UTF8 = 2,
  CDPERC_STATUS_INVALID_PARAMETER = 3,
  CDPERC_STATUS_PARSE = 4,
  CDPERC_STATUS_OUT_OF_RANGE = 5,
  CDPERC_STATUS_IO = 6,
  CDPERC_STATUS_INDEX_OUT_OF_BOUNDS = 7,
  CDPERC_STATUS_PANIC = 8,
} CdpercStatus;

/**
 * Report of a bound verification sweep.
 */
typedef struct CdpercBoundReport CdpercBoundReport;

/**
 * Seeded field of edge clocks.
 */
typedef struct CdpercClockField CdpercClockField;

/**
 * One planar exploration run together with its parameters.
 */
typedef struct CdpercPlanarRun CdpercPlanarRun;

typedef struct CdpercBoundRow {
  uint32_t d;
  uint32_t kappa;
  double s;
  double b;
  double s_threshold;
  double b_threshold;
  /**
   * Row covers every `d` above `d` through the closed-form bound.
   */
  bool closed_form;
  bool pass;
} CdpercBoundRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * call into the library on the same thread.
 */
const char *cdperc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cdperc_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cdperc_string_free(char *s);

/**
 * `P(Bin(m, p) <= k)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CdpercStatus cdperc_binom_cdf(uint64_t m, double p, uint64_t k, double *out);

/**
 * `P(Poisson(lambda) <= k)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CdpercStatus cdperc_poisson_cdf(double lambda, uint64_t k, double *out);

/**
 * Closed-form upper boundary of the supercritical region at bond parameter `b`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CdpercStatus cdperc_sc_upper(double b, double *out);

/**
 * Exact probability of `event` (`edge:<i>` or `connect:<a>-<b>`) at time `t`
 * on a named small graph.
 *
 * # Safety
 * `graph` and `event` must be NUL-terminated strings; `out` valid for writes.
 */
enum CdpercStatus cdperc_oracle_probability(const char *graph,
                                            uint32_t kappa,
                                            double t,
                                            const char *event,
                                            double *out);

/**
 * Monte Carlo estimate of the mixed-percolation connection probability to
 * the sphere of radius `n` in `Z^dim`.
 *
 * # Safety
 * `estimate` and `stderr` must be valid for writes.
 */
enum CdpercStatus cdperc_mixed_theta(double s,
                                     double b,
                                     uint32_t n,
                                     size_t dim,
                                     uint64_t samples,
                                     uint64_t seed,
                                     double *estimate,
                                     double *stderr);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CdpercStatus cdperc_clock_field_new(uint64_t seed, struct CdpercClockField **out);

/**
 * Clock of the edge from `base[0..dim]` in direction `dir`.
 *
 * # Safety
 * `field` must be a live handle, `base` readable for `dim` values and `out`
 * valid for writes.
 */
enum CdpercStatus cdperc_clock_field_clock(const struct CdpercClockField *field,
                                           const int64_t *base,
                                           size_t dim,
                                           uint8_t dir,
                                           double *out);

/**
 * # Safety
 * `field` must be NULL or a live handle; it is invalid afterwards.
 */
void cdperc_clock_field_free(struct CdpercClockField *field);

/**
 * Exact sweep of `(s, b)` at `t = c/d` for `d_min <= d <= d_max`.
 *
 * # Safety
 * `c` must be a NUL-terminated decimal string; `out` valid for writes.
 */
enum CdpercStatus cdperc_verify_sweep(const char *c,
                                      uint32_t kappa,
                                      uint32_t d_min,
                                      uint32_t d_max,
                                      uint32_t chen_floor,
                                      struct CdpercBoundReport **out);

/**
 * The low-dimensional table cases at rate `c`.
 *
 * # Safety
 * `c` must be a NUL-terminated decimal string; `out` valid for writes.
 */
enum CdpercStatus cdperc_verify_table(const char *c, struct CdpercBoundReport **out);

/**
 * # Safety
 * `report` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_bound_report_len(const struct CdpercBoundReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_bound_report_all_pass(const struct CdpercBoundReport *report, bool *out);

/**
 * # Safety
 * `report` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_bound_report_row(const struct CdpercBoundReport *report,
                                          size_t index,
                                          struct CdpercBoundRow *out);

/**
 * # Safety
 * `report` must be NULL or a live handle; it is invalid afterwards.
 */
void cdperc_bound_report_free(struct CdpercBoundReport *report);

/**
 * Explores the in-plane cluster of the origin with clocks seeded by `seed`,
 * recording a trace.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CdpercStatus cdperc_planar_explore(enum CdpercPlanarVariant variant,
                                        uint32_t kappa,
                                        double t,
                                        uint64_t seed,
                                        size_t max_open,
                                        int64_t radius,
                                        struct CdpercPlanarRun **out);

/**
 * # Safety
 * `run` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_planar_run_open_count(const struct CdpercPlanarRun *run, size_t *out);

/**
 * Whether the run reached its stop rule with active vertices left.
 *
 * # Safety
 * `run` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_planar_run_survived(const struct CdpercPlanarRun *run, bool *out);

/**
 * Number of opened vertices not confirmed by replaying the dynamics.
 *
 * # Safety
 * `run` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_planar_run_replay_violations(const struct CdpercPlanarRun *run,
                                                      size_t *out);

/**
 * The run's trace in text form; free with [`cdperc_string_free`].
 *
 * # Safety
 * `run` must be a live handle; `out` valid for writes.
 */
enum CdpercStatus cdperc_planar_run_trace(const struct CdpercPlanarRun *run, char **out);

/**
 * # Safety
 * `run` must be NULL or a live handle; it is invalid afterwards.
 */
void cdperc_planar_run_free(struct CdpercPlanarRun *run);

/**
 * Checks a planar trace text step by step; `ok` receives the verdict.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `ok` valid for writes.
 */
enum CdpercStatus cdperc_check_trace(const char *text, bool *ok);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDPERC_H */
