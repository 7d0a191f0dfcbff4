//! Surface stress, slender body force and the three residual diagnostics.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::geometry::{Frame, SlenderBody};
use crate::sbt::eval::{FieldValue, SectionEvaluator, SourceNodes};
use crate::sbt::{centerline_velocity, ForceDensity, LForm, QuadratureSpec};

type Vec3 = Vector3<f64>;
type Mat3 = Matrix3<f64>;

/// Whether the cross-sectional force integral carries the stretch factor φ′(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceConvention {
    #[default]
    Stretched,
    /// Force per unit fiber arclength: the φ′(s) factor is dropped.
    PerArclength,
}

/// Stress data at one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    pub s: f64,
    pub theta: f64,
    pub normal: Vec3,
    /// ∂u/∂ρ
    pub du_drho: Vec3,
    /// (1/εa) ∂u/∂θ
    pub du_dtheta: Vec3,
    /// (1/(1 − εaκ̂)) ∂u/∂φ
    pub du_dphi: Vec3,
    pub e_rho: Vec3,
    pub e_t: Vec3,
    /// 2E(u)n
    pub strain_rate_normal: Vec3,
    pub pressure: f64,
    /// (2E − pI)n
    pub traction: Vec3,
    pub velocity: Vec3,
}

/// Assembles E_ρ, E_t and the traction from the Cartesian velocity gradient.
fn assemble(body: &SlenderBody, frame: &Frame, phi: f64, s: f64, theta: f64, field: &FieldValue) -> StressSample {
    let g = &field.grad;
    let er = frame.e_rho(theta);
    let eth = frame.e_theta(theta);
    let et = frame.t;
    let d_rho = g * er;
    let d_theta = g * eth;
    let d_phi = g * et;
    let e_rho = -d_rho - er * d_rho.dot(&er) - eth * d_theta.dot(&er) - et * d_phi.dot(&er);
    let e_t = d_phi + et * d_phi.dot(&et) + er * d_rho.dot(&et) + eth * d_theta.dot(&et);
    let eap = body.epsilon * body.radius.a_prime(phi);
    let norm = (1.0 + eap * eap).sqrt();
    let strain = (e_rho + e_t * eap) / norm;
    let normal = body.normal_with(frame, phi, theta);
    StressSample {
        s,
        theta,
        normal,
        du_drho: d_rho,
        du_dtheta: d_theta,
        du_dphi: d_phi,
        e_rho,
        e_t,
        strain_rate_normal: strain,
        pressure: field.p,
        traction: strain - normal * field.p,
        velocity: field.u,
    }
}

/// Analytic surface stress at (φ(s), θ).
pub fn surface_stress(body: &SlenderBody, force: &ForceDensity, s: f64, theta: f64, quad: &QuadratureSpec) -> Result<StressSample> {
    let ev = SectionEvaluator::new(body, force, s, quad)?;
    let field = ev.field(theta)?;
    let frame = body.frame_at(ev.phi);
    Ok(assemble(body, &frame, ev.phi, s, theta, &field))
}

/// σ = ∇u + ∇uᵀ − pI by second-order central differences of a velocity and
/// pressure field.
pub fn fd_stress<F>(field: F, x: &Vec3, h: f64) -> Result<Mat3>
where
    F: Fn(&Vec3) -> Result<(Vec3, f64)>,
{
    let mut g = Mat3::zeros();
    for k in 0..3 {
        let mut e = Vec3::zeros();
        e[k] = h;
        let (up, _) = field(&(x + e))?;
        let (um, _) = field(&(x - e))?;
        g.set_column(k, &((up - um) / (2.0 * h)));
    }
    let (_, p) = field(x)?;
    Ok(g + g.transpose() - Mat3::identity() * p)
}

/// Finite-difference stress at the point offset outward from Γ_ε(φ(s), θ)
/// by `offset`, using one node set for the whole stencil.
pub fn fd_stress_oracle(body: &SlenderBody, force: &ForceDensity, s: f64, theta: f64, offset: f64, h: f64, quad: &QuadratureSpec) -> Result<Mat3> {
    quad.validate()?;
    let phi = body.stretch.phi(s);
    let ea = body.epsilon * body.radius.a(phi);
    if !(h > 0.0 && h <= 0.1 * ea) {
        return Err(SbtError::domain(format!("step h = {h:e} must lie in (0, epsilon a / 10 = {:e}]", 0.1 * ea)));
    }
    if !(offset >= 2.0 * h) {
        return Err(SbtError::domain(format!("offset {offset:e} must be at least 2h = {:e}", 2.0 * h)));
    }
    let n = body.surface_normal(phi, theta)?;
    let x = body.surface_point(phi, theta)? - n * offset;
    let nodes = SourceNodes::for_point(body, force, quad, &x);
    fd_stress(|y| Ok((nodes.velocity(y)?, nodes.pressure(y)?)), &x, h)
}

/// Surface stress from the oracle: quadratic extrapolation to the surface
/// from offsets 2h, 4h and 6h.
pub fn fd_surface_stress(body: &SlenderBody, force: &ForceDensity, s: f64, theta: f64, h: f64, quad: &QuadratureSpec) -> Result<Mat3> {
    let at = |k: f64| fd_stress_oracle(body, force, s, theta, k * h, h, quad);
    Ok(at(2.0)? * 3.0 - at(4.0)? * 3.0 + at(6.0)?)
}

/// Cross-sectional force integrals at one s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub f_sb: Vec3,
    pub f_tilde: Vec3,
    pub f_rho: Vec3,
    pub f_t: Vec3,
}

/// Everything computed on one cross section in a single θ pass.
#[derive(Debug, Clone)]
pub struct SectionResult {
    pub s: f64,
    pub velocities: Vec<Vec3>,
    pub theta_residuals: Vec<Vec3>,
    pub theta_residual_sup: f64,
    pub force: ForceSample,
    pub quad_warn: bool,
}

fn section_pass(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec, conv: ForceConvention, with_stress: bool) -> Result<SectionResult> {
    let ev = SectionEvaluator::new(body, force, s, quad)?;
    let phi = ev.phi;
    let frame = body.frame_at(phi);
    let thetas = quad.thetas();
    let dth = TAU / thetas.len() as f64;
    let ea = body.epsilon * body.radius.a(phi);
    let eap = body.epsilon * body.radius.a_prime(phi);
    let stretch = match conv {
        ForceConvention::Stretched => body.stretch.derivative(s),
        ForceConvention::PerArclength => 1.0,
    };
    let mut velocities = Vec::with_capacity(thetas.len());
    let mut fsb = Vec3::zeros();
    let mut frho = Vec3::zeros();
    let mut ft = Vec3::zeros();
    for &th in &thetas {
        if with_stress {
            let field = ev.field(th)?;
            let st = assemble(body, &frame, phi, s, th, &field);
            let jac = body.jacobian_with(&frame, phi, th);
            fsb += st.traction * (jac * stretch * dth);
            frho += (st.e_rho + frame.e_rho(th) * st.pressure) * (ea * dth);
            ft += (st.e_t - frame.t * st.pressure) * (ea * eap * dth);
            velocities.push(field.u);
        } else {
            velocities.push(ev.velocity(th)?);
        }
    }
    let mean = velocities.iter().fold(Vec3::zeros(), |a, v| a + v) / velocities.len() as f64;
    let theta_residuals: Vec<Vec3> = velocities.iter().map(|v| v - mean).collect();
    let sup = theta_residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let quad_warn = ev.quad_warning(force, quad)?;
    let result = SectionResult {
        s,
        velocities,
        theta_residuals,
        theta_residual_sup: sup,
        force: ForceSample { f_sb: fsb, f_tilde: frho + ft, f_rho: frho, f_t: ft },
        quad_warn,
    };
    if !result.theta_residual_sup.is_finite() || !result.force.f_sb.iter().all(|c| c.is_finite()) {
        return Err(SbtError::numerical(format!("non-finite residual at s = {s}")));
    }
    Ok(result)
}

/// u^r(θ) = u^SB(θ) − θ-mean, on the trapezoid grid, and its sup norm.
pub fn theta_residual(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec) -> Result<(Vec<Vec3>, f64)> {
    let r = section_pass(body, force, s, quad, ForceConvention::Stretched, false)?;
    Ok((r.theta_residuals, r.theta_residual_sup))
}

/// f^SB(s) = ∫ (2E − pI)n J φ′ dθ together with F̃, F̃_ρ, F̃_t.
pub fn sbt_force(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec, conv: ForceConvention) -> Result<ForceSample> {
    Ok(section_pass(body, force, s, quad, conv, true)?.force)
}

/// sup_θ |u^SB(s, θ) − u_C(s)|.
pub fn centerline_gap(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec, form: LForm) -> Result<f64> {
    let r = section_pass(body, force, s, quad, ForceConvention::Stretched, false)?;
    let uc = centerline_velocity(body, force, s, quad, form)?;
    Ok(r.velocities.iter().map(|v| (v - uc).norm()).fold(0.0, f64::max))
}

/// Residual options shared by the sample and sweep drivers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    #[serde(default)]
    pub l_form: LForm,
    #[serde(default)]
    pub force_convention: ForceConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSample {
    pub s: f64,
    pub theta_residual_sup: f64,
    /// f^SB(s) − f(s)
    pub force_residual: Vec3,
    pub centerline_gap: f64,
    /// |f^SB − F̃|
    pub force_split_gap: f64,
    /// |F̃_ρ − f|
    pub f_rho_residual: f64,
    /// |F̃_t|
    pub f_t_norm: f64,
    pub quad_warn: bool,
}

/// All residual diagnostics at one s.
pub fn residual_sample(body: &SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec, opts: &ResidualOptions) -> Result<ResidualSample> {
    let r = section_pass(body, force, s, quad, opts.force_convention, true)?;
    let uc = centerline_velocity(body, force, s, quad, opts.l_form)?;
    let fs = force.value(s);
    Ok(ResidualSample {
        s,
        theta_residual_sup: r.theta_residual_sup,
        force_residual: r.force.f_sb - fs,
        centerline_gap: r.velocities.iter().map(|v| (v - uc).norm()).fold(0.0, f64::max),
        force_split_gap: (r.force.f_sb - r.force.f_tilde).norm(),
        f_rho_residual: (r.force.f_rho - fs).norm(),
        f_t_norm: r.force.f_t.norm(),
        quad_warn: r.quad_warn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::spec::CenterlineSpec;
    use crate::geometry::GeometrySpec;
    use crate::kernels::stokeslet;
    use std::f64::consts::PI;

    fn arc(eps: f64) -> SlenderBody {
        let mut spec = GeometrySpec::straight_prolate(eps);
        spec.centerline = CenterlineSpec::CircularArc { radius: 2.0 };
        spec.frame.seed_normal = None;
        spec.build().unwrap()
    }

    #[test]
    fn strain_assembly_equals_symmetric_gradient() {
        let b = arc(0.1);
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.4, -0.3));
        for (s, th) in [(0.3, 0.2), (-0.8, 2.5), (0.97, 4.0)] {
            let st = surface_stress(&b, &f, s, th, &q).unwrap();
            let ev = SectionEvaluator::new(&b, &f, s, &q).unwrap();
            let g = ev.field(th).unwrap().grad;
            let direct = (g + g.transpose()) * st.normal;
            assert!((direct - st.strain_rate_normal).norm() < 1e-12 * direct.norm());
            assert!((st.traction - (st.strain_rate_normal - st.normal * st.pressure)).norm() == 0.0);
        }
    }

    #[test]
    fn stokeslet_stress_oracle() {
        let f0 = Vec3::new(0.3, -1.0, 0.5);
        let field = |y: &Vec3| -> Result<(Vec3, f64)> { Ok((stokeslet(y)? * f0 / (8.0 * PI), y.dot(&f0) / (4.0 * PI * y.norm().powi(3)))) };
        let x = Vec3::new(0.7, 0.2, -0.4);
        let r = x.norm();
        let exact = x * x.transpose() * (-6.0 * x.dot(&f0) / (8.0 * PI * r.powi(5)));
        let e1 = (fd_stress(field, &x, 1e-3).unwrap() - exact).abs().max();
        let e2 = (fd_stress(field, &x, 5e-4).unwrap() - exact).abs().max();
        assert!(e1 < 1e-5, "{e1}");
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{e1} {e2}");
    }

    #[test]
    fn surface_traction_matches_fd_oracle() {
        let b = arc(0.1);
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.5, -0.3));
        for (s, th) in [(0.1, 0.3), (-0.7, 2.0), (0.85, 5.1)] {
            let st = surface_stress(&b, &f, s, th, &q).unwrap();
            let fd = fd_surface_stress(&b, &f, s, th, 1e-5, &q).unwrap() * st.normal;
            assert!((st.traction - fd).norm() < 1e-6 * st.traction.norm().max(1.0), "{s} {th}");
        }
    }

    #[test]
    fn oracle_is_linear_and_guards_offsets() {
        let b = arc(0.1);
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::x());
        let a = fd_stress_oracle(&b, &f, 0.2, 1.0, 2e-5, 1e-5, &q).unwrap();
        let a2 = fd_stress_oracle(&b, &f.scaled(2.0), 0.2, 1.0, 2e-5, 1e-5, &q).unwrap();
        assert!((a2 - a * 2.0).abs().max() < 1e-12 * a.abs().max());
        assert!(fd_stress_oracle(&b, &f, 0.2, 1.0, 1e-5, 1e-5, &q).is_err());
        assert!(fd_stress_oracle(&b, &f, 0.2, 1.0, 1e-1, 5e-2, &q).is_err());
    }

    #[test]
    fn straight_tangential_force_is_axisymmetric() {
        let b = GeometrySpec::straight_prolate(0.1).build().unwrap();
        let q = QuadratureSpec::default();
        let f = ForceDensity::constant(Vec3::z());
        let (res, sup) = theta_residual(&b, &f, 0.4, &q).unwrap();
        let mean = res.iter().fold(Vec3::zeros(), |a, v| a + v) / res.len() as f64;
        assert!(mean.norm() < 1e-15);
        // radial velocity vanishes on the symmetry plane
        assert!(theta_residual(&b, &f, 0.0, &q).unwrap().1 < 1e-14);
        // elsewhere the radial velocity is O(ε³): the doublet weight a²(t)
        // differs from the exact spheroid weight 1 − t² at O(ε²). Reference
        // value from an independent adaptive integration of the radial part.
        assert!((sup - 3.323185009475234e-5).abs() < 1e-9 * sup, "{sup}");
        let b2 = GeometrySpec::straight_prolate(0.05).build().unwrap();
        let sup2 = theta_residual(&b2, &f, 0.4, &q).unwrap().1;
        assert!((sup2 - 4.293546489735957e-6).abs() < 1e-9 * sup2, "{sup2}");
        let t0 = surface_stress(&b, &f, 0.4, 0.0, &q).unwrap();
        for th in [0.7, 2.0, 4.4] {
            let t = surface_stress(&b, &f, 0.4, th, &q).unwrap();
            // traction rotates with e_ρ; its axial part is θ-independent
            assert!((t.traction.z - t0.traction.z).abs() < 1e-10);
            assert!((t.traction.xy().norm() - t0.traction.xy().norm()).abs() < 1e-10);
        }
        let fs = sbt_force(&b, &f, 0.4, &q, ForceConvention::Stretched).unwrap();
        assert!(fs.f_sb.xy().norm() < 1e-10 * fs.f_sb.norm());
    }

    #[test]
    fn residuals_scale_linearly() {
        let b = arc(0.1);
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.0, 0.3));
        let o = ResidualOptions::default();
        let r1 = residual_sample(&b, &f, 0.5, &q, &o).unwrap();
        let r2 = residual_sample(&b, &f.scaled(2.0), 0.5, &q, &o).unwrap();
        assert!((r2.centerline_gap - 2.0 * r1.centerline_gap).abs() < 1e-13 * r1.centerline_gap);
        assert!((r2.theta_residual_sup - 2.0 * r1.theta_residual_sup).abs() < 1e-13 * r1.theta_residual_sup);
        let fz = residual_sample(&b, &ForceDensity::zero(), 0.5, &q, &o).unwrap();
        assert_eq!((fz.theta_residual_sup, fz.centerline_gap, fz.force_residual.norm()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn force_recovers_prescribed_force() {
        let b = GeometrySpec::straight_prolate(0.05).build().unwrap();
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::x());
        let fs = sbt_force(&b, &f, 0.2, &q, ForceConvention::Stretched).unwrap();
        assert!((fs.f_sb - f.value(0.2)).norm() < 0.1, "{:?}", fs.f_sb);
    }
}
