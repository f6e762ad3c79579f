/* C interface to the chsh-share sequential CHSH sharing library. */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Critical-unsharpness curve selector: both observables equally unsharp,
 * or the first sharp.
 */
typedef enum CssCurve {
  CSS_CURVE_EQUAL_UNSHARPNESS = 0,
  CSS_CURVE_ONE_SHARP = 1,
} CssCurve;

/**
 * Measurement-realization scheme selector.
 */
typedef enum CssScheme {
  CSS_SCHEME_PPM3 = 0,
  CSS_SCHEME_FOUR_KRAUS = 1,
  CSS_SCHEME_TWO_KRAUS = 2,
} CssScheme;

/**
 * Status codes mirroring the CLI exit codes: 0 ok, 2 domain error,
 * 3 infeasible, 4 null pointer or index out of range.
 */
typedef enum CssStatus {
  CSS_STATUS_OK = 0,
  CSS_STATUS_DOMAIN = 2,
  CSS_STATUS_INFEASIBLE = 3,
  CSS_STATUS_NULL_POINTER = 4,
} CssStatus;

/**
 * Opaque simulation result: per-Bob closed-form and brute-force CHSH
 * values.
 */
typedef struct CssSimulation CssSimulation;

/**
 * Opaque synthesis result.
 */
typedef struct CssSynthesis CssSynthesis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the underlying library; static storage, do not free.
 */
const char *css_version(void);

/**
 * Run a sequential chain: one scheme family with per-Bob weights
 * `alphas[0..k]` and identity bias `v` (ignored for `Ppm3`). On success
 * `*out` owns a new handle carrying both the closed-form and brute-force
 * value per Bob.
 *
 * # Safety
 * `alphas` must point to `k` readable doubles; `out` must be a valid
 * writable pointer.
 */
enum CssStatus css_simulate_new(enum CssScheme scheme,
                                size_t k,
                                double delta,
                                double theta,
                                double v,
                                const double *alphas,
                                struct CssSimulation **out);

/**
 * Number of Bobs in the simulation; 0 on null input.
 *
 * # Safety
 * `sim` must be null or a live handle from [`css_simulate_new`].
 */
size_t css_simulate_len(const struct CssSimulation *sim);

/**
 * Closed-form CHSH value of Bob `index` (0-based).
 *
 * # Safety
 * `sim` must be a live handle from [`css_simulate_new`]; `out` writable.
 */
enum CssStatus css_simulate_closed_form(const struct CssSimulation *sim, size_t index, double *out);

/**
 * Brute-force CHSH value of Bob `index` (0-based).
 *
 * # Safety
 * `sim` must be a live handle from [`css_simulate_new`]; `out` writable.
 */
enum CssStatus css_simulate_bruteforce(const struct CssSimulation *sim, size_t index, double *out);

/**
 * Release a simulation handle. Null is ignored.
 *
 * # Safety
 * `sim` must be a handle from [`css_simulate_new`] not yet freed.
 */
void css_simulate_free(struct CssSimulation *sim);

/**
 * Build a three-Kraus sharing sequence. Returns `Infeasible` when the
 * construction cannot reach k Bobs; a handle is still produced so the
 * caller can inspect how far it got.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum CssStatus css_synthesize_t1(size_t k,
                                 double delta,
                                 double epsilon,
                                 double alpha1,
                                 struct CssSynthesis **out);

/**
 * Build a two-Kraus sharing sequence.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum CssStatus css_synthesize_t2(size_t k,
                                 double delta,
                                 double epsilon,
                                 double v,
                                 struct CssSynthesis **out);

/**
 * Number of computed sequence terms; 0 on null input.
 *
 * # Safety
 * `syn` must be null or a live handle from a `css_synthesize_*` call.
 */
size_t css_synthesis_len(const struct CssSynthesis *syn);

/**
 * Whether every Bob in the requested chain violates CHSH.
 *
 * # Safety
 * `syn` must be null or a live handle from a `css_synthesize_*` call.
 */
bool css_synthesis_feasible(const struct CssSynthesis *syn);

/**
 * 1-based index of the first escaping term, or 0 when none.
 *
 * # Safety
 * `syn` must be null or a live handle from a `css_synthesize_*` call.
 */
size_t css_synthesis_infeasible_at(const struct CssSynthesis *syn);

/**
 * Sequence term `index` (0-based).
 *
 * # Safety
 * `syn` must be a live handle; `out` writable.
 */
enum CssStatus css_synthesis_term(const struct CssSynthesis *syn, size_t index, double *out);

/**
 * CHSH value of Bob `index` under the synthesized sequence.
 *
 * # Safety
 * `syn` must be a live handle; `out` writable.
 */
enum CssStatus css_synthesis_chsh(const struct CssSynthesis *syn, size_t index, double *out);

/**
 * Violation margin I − 2 of Bob `index`; exact rearrangement of the closed
 * form, meaningful even far below machine epsilon on the CHSH value.
 *
 * # Safety
 * `syn` must be a live handle; `out` writable.
 */
enum CssStatus css_synthesis_margin(const struct CssSynthesis *syn, size_t index, double *out);

/**
 * Release a synthesis handle. Null is ignored.
 *
 * # Safety
 * `syn` must be a handle from a `css_synthesize_*` call not yet freed.
 */
void css_synthesis_free(struct CssSynthesis *syn);

/**
 * Critical unsharpness at anticommutator expectation `x` on [0, 2].
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum CssStatus css_critical_eta(enum CssCurve curve, double x, double *out);

/**
 * Closed-form CHSH value between Alice and Bob `k` for the given family.
 *
 * # Safety
 * `alphas` must point to `k` readable doubles; `out` writable.
 */
enum CssStatus css_closed_form_chsh(enum CssScheme scheme,
                                    size_t k,
                                    double delta,
                                    double theta,
                                    double v,
                                    const double *alphas,
                                    double *out);

/**
 * Lower edge of the concurrence band admitting k sequential violations.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
enum CssStatus css_concurrence_threshold(size_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
