#ifndef SBT_LAB_H
#define SBT_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Form of the log coefficient in the centerline velocity.
 */
typedef enum SbtLForm {
  SBT_L_FORM_ASYMPTOTIC = 0,
  SBT_L_FORM_LEMMA = 1,
} SbtLForm;

/*
 Result code of every fallible call.
 */
typedef enum SbtStatus {
  SBT_STATUS_OK = 0,
  SBT_STATUS_INPUT_ERROR = 1,
  SBT_STATUS_GEOMETRY_INVALID = 2,
  SBT_STATUS_NUMERICAL_FAILURE = 3,
  SBT_STATUS_NULL_POINTER = 4,
  SBT_STATUS_PANIC = 5,
} SbtStatus;

/*
 Opaque force density along the centerline.
 */
typedef struct SbtForce SbtForce;

/*
 Opaque slender body with its quadrature settings.
 */
typedef struct SbtGeometry SbtGeometry;

/*
 Geometry summary.
 */
typedef struct SbtGeometryInfo {
  double epsilon;
  double c_gamma;
  double kappa_max;
  double r_max;
} SbtGeometryInfo;

/*
 Residual diagnostics at one cross-section.
 */
typedef struct SbtResidualSample {
  double s;
  double theta_residual_sup;
  double force_residual[3];
  double centerline_gap;
  double force_split_gap;
  double f_rho_residual;
  double f_t_norm;
  /*
   1 when the quadrature self-check flagged this sample.
   */
  int32_t quad_warn;
} SbtResidualSample;

/*
 Least-squares fit err ≈ C ε^p |log ε|^q.
 */
typedef struct SbtFit {
  double p;
  double c;
  double r_squared;
  size_t points;
} SbtFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *sbt_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sbt_version(void);

/*
 Builds a geometry from its JSON description.

 # Safety
 `json` must be NUL-terminated; `out` must be writable.
 */
enum SbtStatus sbt_geometry_from_json(const char *json, struct SbtGeometry **out);

/*
 Straight prolate spheroid of slenderness `epsilon` along e_z.

 # Safety
 `out` must be writable.
 */
enum SbtStatus sbt_geometry_straight_prolate(double epsilon, struct SbtGeometry **out);

/*
 Replaces the quadrature settings from a JSON object; missing keys take
 their defaults.

 # Safety
 `geometry` must come from this library; `json` must be NUL-terminated.
 */
enum SbtStatus sbt_geometry_set_quadrature(struct SbtGeometry *geometry, const char *json);

/*
 # Safety
 `geometry` must come from this library; `out` must be writable.
 */
enum SbtStatus sbt_geometry_info(const struct SbtGeometry *geometry, struct SbtGeometryInfo *out);

/*
 Releases a geometry. NULL is ignored.

 # Safety
 `geometry` must come from this library and not be used afterwards.
 */
void sbt_geometry_free(struct SbtGeometry *geometry);

/*
 Parses `constant:fx,fy,fz` or `parabolic:fx,fy,fz`.

 # Safety
 `spec` must be NUL-terminated; `out` must be writable.
 */
enum SbtStatus sbt_force_parse(const char *spec, struct SbtForce **out);

/*
 Releases a force. NULL is ignored.

 # Safety
 `force` must come from this library and not be used afterwards.
 */
void sbt_force_free(struct SbtForce *force);

/*
 Velocity at an exterior point `x[3]`, written to `u_out[3]`.

 # Safety
 Handles must come from this library; arrays must hold 3 doubles.
 */
enum SbtStatus sbt_eval_velocity(const struct SbtGeometry *geometry,
                                 const struct SbtForce *force,
                                 const double *x,
                                 double *u_out);

/*
 Pressure at an exterior point `x[3]`.

 # Safety
 Handles must come from this library; `x` must hold 3 doubles.
 */
enum SbtStatus sbt_eval_pressure(const struct SbtGeometry *geometry,
                                 const struct SbtForce *force,
                                 const double *x,
                                 double *p_out);

/*
 Velocity on the body surface at (s, θ).

 # Safety
 Handles must come from this library; `u_out` must hold 3 doubles.
 */
enum SbtStatus sbt_surface_velocity(const struct SbtGeometry *geometry,
                                    const struct SbtForce *force,
                                    double s,
                                    double theta,
                                    double *u_out);

/*
 Slender body centerline velocity at s.

 # Safety
 Handles must come from this library; `u_out` must hold 3 doubles.
 */
enum SbtStatus sbt_centerline_velocity(const struct SbtGeometry *geometry,
                                       const struct SbtForce *force,
                                       double s,
                                       enum SbtLForm form,
                                       double *u_out);

/*
 All residual diagnostics at s with default options.

 # Safety
 Handles must come from this library; `out` must be writable.
 */
enum SbtStatus sbt_residual_sample(const struct SbtGeometry *geometry,
                                   const struct SbtForce *force,
                                   double s,
                                   struct SbtResidualSample *out);

/*
 Fits err ≈ C ε^p |log ε|^q over `n` pairs. `q = 0` selects the pure power
 law; 1 and 1.5 select the log-corrected forms.

 # Safety
 `epsilons` and `errors` must hold `n` doubles; `out` must be writable.
 */
enum SbtStatus sbt_fit_scaling(const double *epsilons,
                               const double *errors,
                               size_t n,
                               double q,
                               struct SbtFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBT_LAB_H */
