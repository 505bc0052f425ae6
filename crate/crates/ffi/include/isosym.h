#ifndef ISOSYM_H
#define ISOSYM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum IsosymStatus {
  ISOSYM_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  ISOSYM_STATUS_NULL_ARGUMENT = 1,
  // A parameter outside its admissible range.
  ISOSYM_STATUS_INVALID_PARAMETER = 2,
  // An argument outside the domain of the operation.
  ISOSYM_STATUS_DOMAIN = 3,
  // Integrability, convergence or oscillation failures.
  ISOSYM_STATUS_NUMERICAL = 4,
  // Parse, I/O or serialization failures.
  ISOSYM_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  ISOSYM_STATUS_INTERNAL = 6,
} IsosymStatus;

// Parametric estimator families.
typedef enum IsosymEstimatorKind {
  // `param` is α.
  ISOSYM_ESTIMATOR_KIND_CAUCHY_ALPHA = 0,
  // `param` is p.
  ISOSYM_ESTIMATOR_KIND_SUB_EXP_P = 1,
  // `param` is N < 0.
  ISOSYM_ESTIMATOR_KIND_NEG_DIM_N = 2,
  // `param` is ignored.
  ISOSYM_ESTIMATOR_KIND_GAUSSIAN_CONCAVE = 3,
} IsosymEstimatorKind;

// Convex isoperimetric estimator.
typedef struct IsosymEstimator IsosymEstimator;

// Graded quadrature grid on (0,1).
typedef struct IsosymGrid IsosymGrid;

// Product of a one-dimensional model measure.
typedef struct IsosymMeasure IsosymMeasure;

// Rearrangement-invariant quasi-normed space.
typedef struct IsosymSpace IsosymSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string (do not free).
const char *isosym_version(void);

// Message of the last failed call on this thread, or null when the last call
// succeeded. Release with `isosym_string_free`.
char *isosym_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a pointer returned by this library, not yet freed.
void isosym_string_free(char *s);

// Cauchy-type measure `(α/2)(1+|s|)^{-(1+α)}` on `R^dim`.
//
// # Safety
// `out` must be a valid pointer.
enum IsosymStatus isosym_measure_cauchy(double alpha, size_t dim, struct IsosymMeasure **out);

// Sub-exponential measure with exponent `p` on `R^dim`.
//
// # Safety
// `out` must be a valid pointer.
enum IsosymStatus isosym_measure_subexp(double p, size_t dim, struct IsosymMeasure **out);

// Standard Gaussian measure on `R^dim`.
//
// # Safety
// `out` must be a valid pointer.
enum IsosymStatus isosym_measure_gaussian(size_t dim, struct IsosymMeasure **out);

// # Safety
// `m` must be null or a live measure handle.
void isosym_measure_free(struct IsosymMeasure *m);

// One-dimensional density at `s`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_measure_density(const struct IsosymMeasure *m, double s, double *out);

// One-dimensional quantile `H⁻¹(t)`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_measure_quantile(const struct IsosymMeasure *m, double t, double *out);

// Exact isoperimetric profile `I_μ(t)`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_exact_profile(const struct IsosymMeasure *m, double t, double *out);

// Parametric estimator `c·I(t)` on `R^dim`.
//
// # Safety
// `out` must be a valid pointer.
enum IsosymStatus isosym_estimator_new(enum IsosymEstimatorKind kind,
                                       double param,
                                       size_t dim,
                                       double c,
                                       struct IsosymEstimator **out);

// The exact one-dimensional profile of `m` used as an estimator.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_estimator_exact(const struct IsosymMeasure *m,
                                         struct IsosymEstimator **out);

// # Safety
// `e` must be null or a live estimator handle.
void isosym_estimator_free(struct IsosymEstimator *e);

// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_estimator_eval(const struct IsosymEstimator *e, double t, double *out);

// Graded grid with `n` points (a power of two, at least 64).
//
// # Safety
// `out` must be a valid pointer.
enum IsosymStatus isosym_grid_new(size_t n, struct IsosymGrid **out);

// # Safety
// `g` must be null or a live grid handle.
void isosym_grid_free(struct IsosymGrid *g);

// Space from a descriptor such as `lp:2`, `lorentz:2,1` or `lz:1,1,0.5`.
//
// # Safety
// `descriptor` must be a NUL-terminated string and `out` a valid pointer.
enum IsosymStatus isosym_space_parse(const char *descriptor, struct IsosymSpace **out);

// # Safety
// `s` must be null or a live space handle.
void isosym_space_free(struct IsosymSpace *s);

// Quasi-norm of the indicator of a set of measure `u`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_space_norm_indicator(const struct IsosymSpace *s,
                                              double u,
                                              const struct IsosymGrid *g,
                                              double *out);

// Bobkov modulus `β₁(s)`, `s ∈ (0,1/2)`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_beta1(const struct IsosymEstimator *e,
                               double s,
                               const struct IsosymGrid *g,
                               double *out);

// Estimator recovered from `β₁` at `t ∈ (0,1/2]`.
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_recover_estimator(const struct IsosymEstimator *e,
                                           double t,
                                           const struct IsosymGrid *g,
                                           double *out);

// Smallest constant of the peso condition (may be `+inf`).
//
// # Safety
// Pointers must be valid.
enum IsosymStatus isosym_peso_constant(const struct IsosymEstimator *e,
                                       const struct IsosymGrid *g,
                                       double *out);

// Runs a verification suite with default settings for everything but the
// arguments, and returns its certificates as a JSON array in `*json_out`
// (release with `isosym_string_free`). `worst_status_out`, when non-null,
// receives the process-style exit code of the run (0, 1 or 2).
//
// # Safety
// `suite` and `measure` must be NUL-terminated strings; `json_out` valid.
enum IsosymStatus isosym_run_suite(const char *suite,
                                   const char *measure,
                                   double param,
                                   size_t grid,
                                   uint64_t seed,
                                   char **json_out,
                                   int32_t *worst_status_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOSYM_H */
