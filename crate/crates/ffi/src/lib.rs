//! C ABI over the sbt-lab library.
//!
//! Every entry point returns an [`SbtStatus`]. On failure the message is kept
//! in a thread-local slot readable through [`sbt_last_error_message`]. Handles
//! are opaque heap objects released with their `_free` function. Panics are
//! caught at the boundary and reported as [`SbtStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sbt_lab::analysis::{fit_scaling, FitModel};
use sbt_lab::error::SbtError;
use sbt_lab::geometry::spec::GeometrySpec;
use sbt_lab::geometry::{SlenderBody, Vec3};
use sbt_lab::residuals::{residual_sample, ResidualOptions};
use sbt_lab::sbt::{centerline_velocity, sbt_pressure, sbt_surface_velocity as surface_velocity, sbt_velocity, ForceDensity, LForm, QuadratureSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbtStatus {
    Ok = 0,
    InputError = 1,
    GeometryInvalid = 2,
    NumericalFailure = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Form of the log coefficient in the centerline velocity.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbtLForm {
    Asymptotic = 0,
    Lemma = 1,
}

/// Opaque slender body with its quadrature settings.
pub struct SbtGeometry {
    body: SlenderBody,
    quad: QuadratureSpec,
}

/// Opaque force density along the centerline.
pub struct SbtForce {
    force: ForceDensity,
}

/// Residual diagnostics at one cross-section.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SbtResidualSample {
    pub s: f64,
    pub theta_residual_sup: f64,
    pub force_residual: [f64; 3],
    pub centerline_gap: f64,
    pub force_split_gap: f64,
    pub f_rho_residual: f64,
    pub f_t_norm: f64,
    /// 1 when the quadrature self-check flagged this sample.
    pub quad_warn: i32,
}

/// Least-squares fit err ≈ C ε^p |log ε|^q.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SbtFit {
    pub p: f64,
    pub c: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Geometry summary.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SbtGeometryInfo {
    pub epsilon: f64,
    pub c_gamma: f64,
    pub kappa_max: f64,
    pub r_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &SbtError) -> SbtStatus {
    match e.exit_code() {
        2 => SbtStatus::GeometryInvalid,
        3 => SbtStatus::NumericalFailure,
        _ => SbtStatus::InputError,
    }
}

enum Failure {
    Lib(SbtError),
    Null(&'static str),
}

impl From<SbtError> for Failure {
    fn from(e: SbtError) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body` behind the panic guard and converts its outcome to a status.
fn guard<F>(body: F) -> SbtStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SbtStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let st = status_of(&e);
            set_error(e.to_string());
            st
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SbtStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SbtStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Lib(SbtError::input(format!("{what} is not valid UTF-8"))))
}

unsafe fn vec3_in(p: *const f64, what: &'static str) -> Result<Vec3, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(Vec3::new(s[0], s[1], s[2]))
}

unsafe fn vec3_out(p: *mut f64, v: &Vec3, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    std::slice::from_raw_parts_mut(p, 3).copy_from_slice(v.as_slice());
    Ok(())
}

fn nonnull(p: *mut f64, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(())
    }
}

fn finite3(v: Vec3) -> Result<Vec3, Failure> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(SbtError::numerical("non-finite result").into())
    }
}

fn check_s(s: f64) -> Result<(), Failure> {
    if s.is_finite() && s > -1.0 && s < 1.0 {
        Ok(())
    } else {
        Err(SbtError::domain(format!("s = {s} must lie in (-1, 1)")).into())
    }
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn sbt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sbt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a geometry from its JSON description.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_geometry_from_json(json: *const c_char, out: *mut *mut SbtGeometry) -> SbtStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let text = c_str(json, "json")?;
        let spec: GeometrySpec = serde_json::from_str(text).map_err(|e| SbtError::input(format!("geometry json: {e}")))?;
        let body = spec.build()?;
        *slot = Box::into_raw(Box::new(SbtGeometry { body, quad: QuadratureSpec::default() }));
        Ok(())
    })
}

/// Straight prolate spheroid of slenderness `epsilon` along e_z.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_geometry_straight_prolate(epsilon: f64, out: *mut *mut SbtGeometry) -> SbtStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let body = GeometrySpec::straight_prolate(epsilon).build()?;
        *slot = Box::into_raw(Box::new(SbtGeometry { body, quad: QuadratureSpec::default() }));
        Ok(())
    })
}

/// Replaces the quadrature settings from a JSON object; missing keys take
/// their defaults.
///
/// # Safety
/// `geometry` must come from this library; `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sbt_geometry_set_quadrature(geometry: *mut SbtGeometry, json: *const c_char) -> SbtStatus {
    guard(|| {
        let g = out_ref(geometry, "geometry")?;
        let text = c_str(json, "json")?;
        let quad: QuadratureSpec = serde_json::from_str(text).map_err(|e| SbtError::input(format!("quadrature json: {e}")))?;
        quad.validate()?;
        g.quad = quad;
        Ok(())
    })
}

/// # Safety
/// `geometry` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_geometry_info(geometry: *const SbtGeometry, out: *mut SbtGeometryInfo) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let o = out_ref(out, "out")?;
        *o = SbtGeometryInfo { epsilon: g.body.epsilon, c_gamma: g.body.centerline.c_gamma(), kappa_max: g.body.centerline.kappa_max(), r_max: g.body.r_max };
        Ok(())
    })
}

/// Releases a geometry. NULL is ignored.
///
/// # Safety
/// `geometry` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sbt_geometry_free(geometry: *mut SbtGeometry) {
    if !geometry.is_null() {
        drop(Box::from_raw(geometry));
    }
}

/// Parses `constant:fx,fy,fz` or `parabolic:fx,fy,fz`.
///
/// # Safety
/// `spec` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_force_parse(spec: *const c_char, out: *mut *mut SbtForce) -> SbtStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let force = ForceDensity::parse(c_str(spec, "spec")?)?;
        *slot = Box::into_raw(Box::new(SbtForce { force }));
        Ok(())
    })
}

/// Releases a force. NULL is ignored.
///
/// # Safety
/// `force` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sbt_force_free(force: *mut SbtForce) {
    if !force.is_null() {
        drop(Box::from_raw(force));
    }
}

/// Velocity at an exterior point `x[3]`, written to `u_out[3]`.
///
/// # Safety
/// Handles must come from this library; arrays must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sbt_eval_velocity(geometry: *const SbtGeometry, force: *const SbtForce, x: *const f64, u_out: *mut f64) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let f = deref(force, "force")?;
        let x = vec3_in(x, "x")?;
        nonnull(u_out, "u_out")?;
        let u = finite3(sbt_velocity(&g.body, &f.force, &x, &g.quad)?)?;
        vec3_out(u_out, &u, "u_out")
    })
}

/// Pressure at an exterior point `x[3]`.
///
/// # Safety
/// Handles must come from this library; `x` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sbt_eval_pressure(geometry: *const SbtGeometry, force: *const SbtForce, x: *const f64, p_out: *mut f64) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let f = deref(force, "force")?;
        let x = vec3_in(x, "x")?;
        let slot = out_ref(p_out, "p_out")?;
        let p = sbt_pressure(&g.body, &f.force, &x, &g.quad)?;
        if !p.is_finite() {
            return Err(SbtError::numerical("non-finite pressure").into());
        }
        *slot = p;
        Ok(())
    })
}

/// Velocity on the body surface at (s, θ).
///
/// # Safety
/// Handles must come from this library; `u_out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sbt_surface_velocity(geometry: *const SbtGeometry, force: *const SbtForce, s: f64, theta: f64, u_out: *mut f64) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let f = deref(force, "force")?;
        nonnull(u_out, "u_out")?;
        check_s(s)?;
        let u = finite3(surface_velocity(&g.body, &f.force, s, theta, &g.quad)?)?;
        vec3_out(u_out, &u, "u_out")
    })
}

/// Slender body centerline velocity at s.
///
/// # Safety
/// Handles must come from this library; `u_out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sbt_centerline_velocity(geometry: *const SbtGeometry, force: *const SbtForce, s: f64, form: SbtLForm, u_out: *mut f64) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let f = deref(force, "force")?;
        nonnull(u_out, "u_out")?;
        check_s(s)?;
        let form = match form {
            SbtLForm::Asymptotic => LForm::Asymptotic,
            SbtLForm::Lemma => LForm::Lemma,
        };
        let u = finite3(centerline_velocity(&g.body, &f.force, s, &g.quad, form)?)?;
        vec3_out(u_out, &u, "u_out")
    })
}

/// All residual diagnostics at s with default options.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_residual_sample(geometry: *const SbtGeometry, force: *const SbtForce, s: f64, out: *mut SbtResidualSample) -> SbtStatus {
    guard(|| {
        let g = deref(geometry, "geometry")?;
        let f = deref(force, "force")?;
        let o = out_ref(out, "out")?;
        check_s(s)?;
        let r = residual_sample(&g.body, &f.force, s, &g.quad, &ResidualOptions::default())?;
        *o = SbtResidualSample {
            s: r.s,
            theta_residual_sup: r.theta_residual_sup,
            force_residual: [r.force_residual.x, r.force_residual.y, r.force_residual.z],
            centerline_gap: r.centerline_gap,
            force_split_gap: r.force_split_gap,
            f_rho_residual: r.f_rho_residual,
            f_t_norm: r.f_t_norm,
            quad_warn: r.quad_warn as i32,
        };
        Ok(())
    })
}

/// Fits err ≈ C ε^p |log ε|^q over `n` pairs. `q = 0` selects the pure power
/// law; 1 and 1.5 select the log-corrected forms.
///
/// # Safety
/// `epsilons` and `errors` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sbt_fit_scaling(epsilons: *const f64, errors: *const f64, n: usize, q: f64, out: *mut SbtFit) -> SbtStatus {
    guard(|| {
        if epsilons.is_null() || errors.is_null() {
            return Err(Failure::Null("epsilons/errors"));
        }
        let o = out_ref(out, "out")?;
        let eps = std::slice::from_raw_parts(epsilons, n);
        let err = std::slice::from_raw_parts(errors, n);
        let pairs: Vec<(f64, f64)> = eps.iter().copied().zip(err.iter().copied()).collect();
        let model = if q == 0.0 { FitModel::Pow } else { FitModel::LogCorrected { q } };
        let fit = fit_scaling(&pairs, model)?;
        *o = SbtFit { p: fit.p, c: fit.c, r_squared: fit.r_squared, points: fit.points };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = sbt_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(SbtStatus::Ok as i32, 0);
        assert_eq!(SbtStatus::InputError as i32, 1);
        assert_eq!(SbtStatus::GeometryInvalid as i32, 2);
        assert_eq!(SbtStatus::NumericalFailure as i32, 3);
        assert_eq!(SbtStatus::NullPointer as i32, 4);
        assert_eq!(SbtStatus::Panic as i32, 5);
    }

    #[test]
    fn panic_is_contained() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, SbtStatus::Panic);
        assert!(last_error().contains("boom"));
    }

    #[test]
    fn success_clears_error() {
        let mut g = ptr::null_mut();
        assert_eq!(unsafe { sbt_geometry_straight_prolate(0.2, &mut g) }, SbtStatus::GeometryInvalid);
        assert!(g.is_null());
        assert!(!sbt_last_error_message().is_null());
        assert_eq!(unsafe { sbt_geometry_straight_prolate(0.1, &mut g) }, SbtStatus::Ok);
        assert!(sbt_last_error_message().is_null());
        unsafe { sbt_geometry_free(g) };
    }

    #[test]
    fn version_matches_crate() {
        let v = unsafe { CStr::from_ptr(sbt_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
