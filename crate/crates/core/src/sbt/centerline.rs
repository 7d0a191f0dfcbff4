//! Asymptotic centerline velocity u_C(s).

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::force::ForceDensity;
use super::quad::QuadratureSpec;
use crate::error::{Result, SbtError};
use crate::geometry::SlenderBody;
use crate::quadrature::Panels;

type Vec3 = Vector3<f64>;
type Mat3 = Matrix3<f64>;

/// Below this separation the regularized integrand is replaced by its limit.
pub const DELTA_SING: f64 = 1e-5;

/// Which radius term appears under the square root in L(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LForm {
    /// 2√((1−s²)² + 4ε²a²)
    #[default]
    Asymptotic,
    /// 2√((1−s²)² + ε²a²)
    Lemma,
}

/// L(s) = log[(2(1−s²) + 2√((1−s²)² + c ε²a²(s))) / (ε²a²(s))], c = 4 or 1.
pub fn l_coefficient(body: &SlenderBody, s: f64, form: LForm) -> f64 {
    let ea2 = (body.epsilon * body.radius.a(s)).powi(2);
    let w = 1.0 - s * s;
    let c = match form {
        LForm::Asymptotic => 4.0,
        LForm::Lemma => 1.0,
    };
    ((2.0 * w + 2.0 * (w * w + c * ea2).sqrt()) / ea2).ln()
}

/// 8π u_C(s) = [(I − 3e_te_tᵀ) + (I + e_te_tᵀ)L(s)] f(s)
///           + ∫₋₁¹ [S(R_C) f(t) − (I + e_te_tᵀ) f(s)/|s − t|] dt.
pub fn centerline_velocity(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec, form: LForm) -> Result<Vec3> {
    quad.validate()?;
    if !(-1.0..=1.0).contains(&s) {
        return Err(SbtError::domain(format!("s = {s} outside [-1, 1]")));
    }
    let (xs, t_s, k_s) = body.centerline.jet(s);
    let fs = force.value(s);
    let fps = force.derivative(s);
    let tt = t_s * t_s.transpose();
    let local_op = Mat3::identity() + tt;
    let l = l_coefficient(body, s, form);
    let local = (Mat3::identity() - tt * 3.0 + local_op * l) * fs;

    // One-sided limit of the regularized integrand as t → s±.
    let limit = local_op * fps + (t_s * k_s.dot(&fs) + k_s * t_s.dot(&fs)) * 0.5;

    let integrand = |t: f64| -> Vec3 {
        let h = t - s;
        if h.abs() < DELTA_SING {
            return limit * h.signum();
        }
        let rc = xs - body.centerline.position(t);
        let r = rc.norm();
        let ft = force.value(t);
        ft / r + rc * (rc.dot(&ft) / (r * r * r)) - local_op * fs / h.abs()
    };

    let mut acc = Vec3::zeros();
    let w = quad.window();
    for (lo, hi) in [(-1.0, s), (s, 1.0)] {
        if hi - lo <= 0.0 {
            continue;
        }
        for (t, wt) in Panels::uniform(lo, hi, w).nodes(quad.nodes_per_panel) {
            acc += integrand(t) * wt;
        }
    }
    let out = (local + acc) / (8.0 * PI);
    if !out.iter().all(|c| c.is_finite()) {
        return Err(SbtError::numerical(format!("non-finite centerline velocity at s = {s}")));
    }
    Ok(out)
}
