#ifndef MUSHYBENCH_H
#define MUSHYBENCH_H

/* Generated by cbindgen from the mushybench-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call. On anything but
 * `MB_STATUS_OK`, `mb_last_error()` carries the message.
 */
typedef enum {
  MB_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  MB_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  MB_STATUS_INVALID_UTF8 = 2,
  /**
   * The input was understood but rejected (bad JSON, bad property values,
   * out-of-domain sample point).
   */
  MB_STATUS_INVALID_INPUT = 3,
  /**
   * A root search or assembly step failed to converge.
   */
  MB_STATUS_SOLVER_FAILURE = 4,
  /**
   * An internal panic was caught at the boundary; state may be stale but
   * the process is intact.
   */
  MB_STATUS_PANIC = 5,
} MbStatus;

/**
 * Opaque exact two-front similarity solution.
 */
typedef struct MbExact MbExact;

/**
 * Opaque linearization result (the three constant phase diffusivities and
 * the closed-form fraction model).
 */
typedef struct MbLinearization MbLinearization;

/**
 * Opaque alloy property set.
 */
typedef struct MbMaterial MbMaterial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or NULL if the
 * most recent call succeeded. The pointer stays valid until the next
 * library call on the same thread; copy it if you need to keep it.
 */
const char *mb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mb_version(void);

/**
 * Parses a material property set from a JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid location; the
 * returned handle must be released with `mb_material_free`.
 */
MbStatus mb_material_from_json(const char *json, MbMaterial **out);

/**
 * Reads and parses a material property file (UTF-8 JSON).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid location; the
 * returned handle must be released with `mb_material_free`.
 */
MbStatus mb_material_from_json_file(const char *path, MbMaterial **out);

/**
 * Releases a material handle; NULL is ignored.
 *
 * # Safety
 * `material` must be a handle from this library that has not been freed.
 */
void mb_material_free(MbMaterial *material);

/**
 * Solves for the constant mushy diffusivity with the standard search window.
 *
 * # Safety
 * `material` must be a live handle and `out` a valid location; the returned
 * handle must be released with `mb_linearization_free`.
 */
MbStatus mb_linearize(const MbMaterial *material, MbLinearization **out);

/**
 * Releases a linearization handle; NULL is ignored.
 *
 * # Safety
 * `lin` must be a handle from this library that has not been freed.
 */
void mb_linearization_free(MbLinearization *lin);

/**
 * Writes the solid, mushy, and liquid diffusivities in m²/s.
 *
 * # Safety
 * `lin` must be a live handle; the three output pointers must be valid.
 */
MbStatus mb_linearization_diffusivities(const MbLinearization *lin,
                                        double *alpha_s,
                                        double *alpha_sl,
                                        double *alpha_l);

/**
 * Writes |λ(T_s) − λ0| at the converged mushy diffusivity.
 *
 * # Safety
 * `lin` must be a live handle and `residual` a valid location.
 */
MbStatus mb_linearization_residual(const MbLinearization *lin, double *residual);

/**
 * Assembles the exact two-front solution for a chilled boundary at `t_out`
 * °C and an initial melt at `t_init` °C (requires
 * t_out < solidus < liquidus < t_init).
 *
 * # Safety
 * `material` and `lin` must be live handles and `out` a valid location; the
 * returned handle must be released with `mb_exact_free`.
 */
MbStatus mb_exact_new(const MbMaterial *material,
                      const MbLinearization *lin,
                      double t_out,
                      double t_init,
                      MbExact **out);

/**
 * Releases an exact-solution handle; NULL is ignored.
 *
 * # Safety
 * `exact` must be a handle from this library that has not been freed.
 */
void mb_exact_free(MbExact *exact);

/**
 * Writes the front coefficients k_s, k_l in m/s^½ (X = k·√t).
 *
 * # Safety
 * `exact` must be a live handle; `k_s` and `k_l` must be valid locations.
 */
MbStatus mb_exact_front_coefficients(const MbExact *exact, double *k_s, double *k_l);

/**
 * Writes the front positions X_s(t), X_l(t) in m at `t` seconds (t ≥ 0).
 *
 * # Safety
 * `exact` must be a live handle; `x_s` and `x_l` must be valid locations.
 */
MbStatus mb_exact_front_positions(const MbExact *exact, double t, double *x_s, double *x_l);

/**
 * Writes the temperature in °C at (`x` m, `t` s) with x ≥ 0, t > 0.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_temperature(const MbExact *exact, double x, double t, double *out);

/**
 * Writes the volumetric enthalpy in J/m³ at (`x` m, `t` s).
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_enthalpy(const MbExact *exact, double x, double t, double *out);

/**
 * Writes ∂T/∂x in K/m at (`x` m, `t` s). The gradient jumps across the two
 * fronts; sampling exactly on a front is rejected, nudge the point to one
 * side instead.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_temperature_gradient(const MbExact *exact, double x, double t, double *out);

/**
 * Writes ∂T/∂t in K/s at (`x` m, `t` s); same front rule as the gradient.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_cooling_rate(const MbExact *exact, double x, double t, double *out);

/**
 * Writes G_l(t), the liquid-side temperature gradient at the liquidus front,
 * in K/m.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_liquidus_gradient(const MbExact *exact, double t, double *out);

/**
 * Writes Ṫ_l(t), the cooling rate at the liquidus front, in K/s.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_liquidus_cooling_rate(const MbExact *exact, double t, double *out);

/**
 * Writes the local solidification time (1/k_s² − 1/k_l²)·x² in s: how long
 * the point at `x` m stays inside the mushy zone.
 *
 * # Safety
 * `exact` must be a live handle and `out` a valid location.
 */
MbStatus mb_exact_local_solidification_time(const MbExact *exact, double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUSHYBENCH_H */
