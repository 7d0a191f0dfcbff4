//! Slender body velocity, pressure and velocity gradient by near-singular
//! quadrature over the effective centerline.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::force::ForceDensity;
use super::quad::QuadratureSpec;
use crate::error::{Result, SbtError};
use crate::geometry::SlenderBody;
use crate::kernels::{fused_velocity_gradient, SINGULAR_RADIUS};

type Vec3 = Vector3<f64>;
type Mat3 = Matrix3<f64>;

/// Relative change between the last two refinement levels that triggers a
/// quadrature warning.
pub const QUAD_WARN_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct Source {
    x: Vec3,
    f: Vec3,
    /// ε² a²(t) / 2
    c: f64,
    w: f64,
}

/// Quadrature nodes over the effective centerline for one grading center.
#[derive(Debug, Clone)]
pub struct SourceNodes {
    sources: Vec<Source>,
}

/// u^SB, ∇u^SB (entry (i, k) = ∂_k u_i) and p^SB at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub u: Vec3,
    pub grad: Mat3,
    pub p: f64,
}

impl SourceNodes {
    pub fn new(body: &SlenderBody, force: &ForceDensity, quad: &QuadratureSpec, center: f64, levels: usize) -> Self {
        let panels = quad.panels(center, levels);
        let eps = body.epsilon;
        let sources = panels
            .nodes(quad.nodes_per_panel)
            .into_iter()
            .map(|(t, w)| {
                let a = body.radius.a(t);
                Source { x: body.centerline.position(t), f: force.value(t), c: 0.5 * eps * eps * a * a, w }
            })
            .collect();
        SourceNodes { sources }
    }

    /// Nodes graded toward the centerline point nearest to `x`.
    pub fn for_point(body: &SlenderBody, force: &ForceDensity, quad: &QuadratureSpec, x: &Vec3) -> Self {
        Self::for_point_levels(body, force, quad, x, None)
    }

    fn for_point_levels(body: &SlenderBody, force: &ForceDensity, quad: &QuadratureSpec, x: &Vec3, drop: Option<usize>) -> Self {
        let (t, d) = body.centerline.closest_parameter(x, -1.0, 1.0);
        let mut levels = quad.levels_for(d);
        if let Some(k) = drop {
            levels = levels.saturating_sub(k);
        }
        Self::new(body, force, quad, t, levels)
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Velocity only.
    pub fn velocity(&self, x: &Vec3) -> Result<Vec3> {
        let mut acc = Vec3::zeros();
        for s in &self.sources {
            let r = x - s.x;
            let r2 = r.norm_squared();
            if r2 < SINGULAR_RADIUS * SINGULAR_RADIUS {
                return Err(SbtError::Singular(r2.sqrt()));
            }
            let inv = 1.0 / r2.sqrt();
            let inv3 = inv / r2;
            let rf = r.dot(&s.f);
            acc += (s.f * (inv + s.c * inv3) + r * (rf * (inv3 - 3.0 * s.c * inv3 / r2))) * s.w;
        }
        Ok(acc / (8.0 * PI))
    }

    /// Pressure only.
    pub fn pressure(&self, x: &Vec3) -> Result<f64> {
        let mut acc = 0.0;
        for s in &self.sources {
            let r = x - s.x;
            let r2 = r.norm_squared();
            if r2 < SINGULAR_RADIUS * SINGULAR_RADIUS {
                return Err(SbtError::Singular(r2.sqrt()));
            }
            acc += s.w * r.dot(&s.f) / (r2 * r2.sqrt());
        }
        Ok(acc / (4.0 * PI))
    }

    /// Velocity, gradient and pressure in one pass.
    pub fn field(&self, x: &Vec3) -> Result<FieldValue> {
        let mut u = Vec3::zeros();
        let mut g = Mat3::zeros();
        let mut p = 0.0;
        for s in &self.sources {
            let r = x - s.x;
            let rn = r.norm();
            if rn < SINGULAR_RADIUS {
                return Err(SbtError::Singular(rn));
            }
            let (v, dv, pk) = fused_velocity_gradient(&r, &s.f, s.c);
            u += v * s.w;
            g += dv * s.w;
            p += pk * s.w;
        }
        Ok(FieldValue { u: u / (8.0 * PI), grad: g / (8.0 * PI), p: p / (4.0 * PI) })
    }
}

fn check_outside(body: &SlenderBody, x: &Vec3) -> Result<()> {
    if !x.iter().all(|c| c.is_finite()) {
        return Err(SbtError::input("evaluation point must be finite"));
    }
    if body.contains(x) {
        return Err(SbtError::domain(format!("point ({}, {}, {}) lies inside the fiber", x[0], x[1], x[2])));
    }
    Ok(())
}

/// u^SB(x) = (1/8π) ∫₋₁¹ (S(R) + ε²a²(t)/2 D(R)) f(t) dt, R = x − X(t).
pub fn sbt_velocity(body: &SlenderBody, force: &ForceDensity, x: &Vec3, quad: &QuadratureSpec) -> Result<Vec3> {
    quad.validate()?;
    check_outside(body, x)?;
    SourceNodes::for_point(body, force, quad, x).velocity(x)
}

/// p^SB(x) = (1/4π) ∫₋₁¹ R·f(t)/|R|³ dt.
pub fn sbt_pressure(body: &SlenderBody, force: &ForceDensity, x: &Vec3, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    check_outside(body, x)?;
    SourceNodes::for_point(body, force, quad, x).pressure(x)
}

/// Velocity, gradient and pressure at an exterior point.
pub fn sbt_field(body: &SlenderBody, force: &ForceDensity, x: &Vec3, quad: &QuadratureSpec) -> Result<FieldValue> {
    quad.validate()?;
    check_outside(body, x)?;
    SourceNodes::for_point(body, force, quad, x).field(x)
}

/// Point evaluation with a self-check against one fewer refinement level.
#[derive(Debug, Clone, Copy)]
pub struct CheckedEval {
    pub u: Vec3,
    pub p: f64,
    pub quad_warn: bool,
}

pub fn sbt_eval_checked(body: &SlenderBody, force: &ForceDensity, x: &Vec3, quad: &QuadratureSpec) -> Result<CheckedEval> {
    quad.validate()?;
    check_outside(body, x)?;
    let fine = SourceNodes::for_point(body, force, quad, x);
    let coarse = SourceNodes::for_point_levels(body, force, quad, x, Some(1));
    let u = fine.velocity(x)?;
    let p = fine.pressure(x)?;
    let u0 = coarse.velocity(x)?;
    let p0 = coarse.pressure(x)?;
    let du = (u - u0).norm() / u.norm().max(1e-300);
    let dp = (p - p0).abs() / p.abs().max(1e-300);
    let scale_u = u.norm() > 1e-300;
    let scale_p = p.abs() > 1e-300;
    let quad_warn = (scale_u && du > QUAD_WARN_TOL) || (scale_p && dp > QUAD_WARN_TOL);
    if !u.iter().all(|c| c.is_finite()) || !p.is_finite() {
        return Err(SbtError::numerical("non-finite slender body evaluation"));
    }
    Ok(CheckedEval { u, p, quad_warn })
}

/// Evaluator for one cross section φ(s): a single node set graded toward
/// the section, shared by all θ.
#[derive(Debug, Clone)]
pub struct SectionEvaluator<'a> {
    pub body: &'a SlenderBody,
    pub s: f64,
    pub phi: f64,
    center: f64,
    levels: usize,
    nodes: SourceNodes,
}

impl<'a> SectionEvaluator<'a> {
    pub fn new(body: &'a SlenderBody, force: &ForceDensity, s: f64, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        if !(-1.0..=1.0).contains(&s) {
            return Err(SbtError::domain(format!("s = {s} outside [-1, 1]")));
        }
        let phi = body.stretch.phi(s);
        let center = phi.clamp(-1.0, 1.0);
        let x_c = body.centerline.position(center);
        let frame = body.frame_at(phi);
        let ea = body.epsilon * body.radius.a(phi);
        let x_phi = body.centerline.position(phi);
        let d = quad.thetas().iter().map(|&th| (x_phi + frame.e_rho(th) * ea - x_c).norm()).fold(f64::INFINITY, f64::min);
        let levels = quad.levels_for(d);
        Ok(SectionEvaluator { body, s, phi, center, levels, nodes: SourceNodes::new(body, force, quad, center, levels) })
    }

    pub fn point(&self, theta: f64) -> Vec3 {
        self.body.surface_point_unchecked(self.phi, theta)
    }

    pub fn velocity(&self, theta: f64) -> Result<Vec3> {
        self.nodes.velocity(&self.point(theta))
    }

    pub fn field(&self, theta: f64) -> Result<FieldValue> {
        self.nodes.field(&self.point(theta))
    }

    /// True when dropping one refinement level moves u(θ = 0) by more than
    /// the warning tolerance.
    pub fn quad_warning(&self, force: &ForceDensity, quad: &QuadratureSpec) -> Result<bool> {
        let x = self.point(0.0);
        let u = self.nodes.velocity(&x)?;
        let coarse = SourceNodes::new(self.body, force, quad, self.center, self.levels.saturating_sub(1));
        let u0 = coarse.velocity(&x)?;
        Ok(u.norm() > 1e-300 && (u - u0).norm() > QUAD_WARN_TOL * u.norm())
    }
}

/// u^SB on Γ_ε at (φ(s), θ).
pub fn sbt_surface_velocity(body: &SlenderBody, force: &ForceDensity, s: f64, theta: f64, quad: &QuadratureSpec) -> Result<Vec3> {
    SectionEvaluator::new(body, force, s, quad)?.velocity(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeometrySpec, Mat3 as GMat3};
    use crate::kernels::stokeslet;

    fn straight(eps: f64) -> SlenderBody {
        GeometrySpec::straight_prolate(eps).build().unwrap()
    }

    #[test]
    fn linear_in_force() {
        let b = straight(0.1);
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.5, -0.2));
        let x = Vec3::new(0.3, 0.1, 0.4);
        let u1 = sbt_velocity(&b, &f, &x, &q).unwrap();
        let u2 = sbt_velocity(&b, &f.scaled(2.0), &x, &q).unwrap();
        assert!((u2 - u1 * 2.0).norm() <= 1e-15 * u1.norm());
    }

    #[test]
    fn stokeslet_part_closed_form() {
        // ε small enough that the doublet term is negligible is not needed:
        // compare the full expression including the doublet against the
        // closed form of both pieces for a straight fiber.
        let eps = 0.1;
        let b = straight(eps);
        let q = QuadratureSpec::default();
        let rho: f64 = 0.5;
        let x = Vec3::new(rho, 0.0, 0.0);
        let f = ForceDensity::constant(Vec3::z());
        let u = sbt_velocity(&b, &f, &x, &q).unwrap() * (8.0 * PI);
        // Stokeslet: ∫ (1/√(t²+ρ²) + t²/(t²+ρ²)^{3/2}) dt
        let s_part = 2.0 * (1.0 / rho).asinh() + 2.0 * ((1.0 / rho).asinh() - 1.0 / (1.0 + rho * rho).sqrt());
        // Doublet: ε²a²(t)/2 (1/r³ − 3t²/r⁵), a² = (1+ε²−t²)/(1+ε²); integrate by adaptive quadrature
        let mut dbl = |t: f64| {
            let r2 = t * t + rho * rho;
            let a2 = (1.0 + eps * eps - t * t) / (1.0 + eps * eps);
            0.5 * eps * eps * a2 * (1.0 / r2.powf(1.5) - 3.0 * t * t / r2.powf(2.5))
        };
        let d_part = crate::quadrature::adaptive(&mut dbl, -1.0, 1.0, 1e-15);
        assert!((u[2] - (s_part + d_part)).abs() < 1e-10, "{} vs {}", u[2], s_part + d_part);
        assert!(u[0].abs() < 1e-14 && u[1].abs() < 1e-14);
    }

    #[test]
    fn pressure_closed_form_and_orthogonality() {
        let b = straight(0.1);
        let q = QuadratureSpec::default();
        let (rho, z) = (0.3, 0.2);
        let x = Vec3::new(rho, 0.0, z);
        let p = sbt_pressure(&b, &ForceDensity::constant(Vec3::z()), &x, &q).unwrap();
        let prim = |t: f64| -1.0 / ((z - t) * (z - t) + rho * rho).sqrt();
        let exact = -(prim(1.0) - prim(-1.0)) / (4.0 * PI);
        assert!((p - exact).abs() < 1e-10, "{p} {exact}");
        let p0 = sbt_pressure(&b, &ForceDensity::constant(Vec3::z()), &Vec3::new(0.4, 0.1, 0.0), &q).unwrap();
        assert!(p0.abs() < 1e-14);
    }

    #[test]
    fn far_field_is_stokeslet_of_total_force() {
        let b = GeometrySpec::straight_prolate(0.1).build().unwrap();
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.0, 0.5));
        let x = Vec3::new(600.0, -500.0, 583.0);
        let total = Vec3::new(1.0, 0.0, 0.5) * (4.0 / 3.0);
        let u = sbt_velocity(&b, &f, &x, &q).unwrap() * (8.0 * PI);
        let s = stokeslet(&x).unwrap() * total;
        assert!((u - s).norm() <= 1e-4 * total.norm());
    }

    #[test]
    fn inside_point_rejected() {
        let b = straight(0.1);
        let err = sbt_velocity(&b, &ForceDensity::constant(Vec3::x()), &Vec3::new(0.01, 0.0, 0.2), &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, SbtError::Domain(_)));
    }

    #[test]
    fn surface_matches_point_evaluation() {
        let spec = GeometrySpec { centerline: crate::geometry::spec::CenterlineSpec::CircularArc { radius: 2.0 }, ..GeometrySpec::straight_prolate(0.05) };
        let mut spec = spec;
        spec.frame.seed_normal = None;
        let b = spec.build().unwrap();
        let q = QuadratureSpec::default();
        let f = ForceDensity::parabolic(Vec3::new(1.0, 0.3, 0.2));
        for k in 0..12 {
            let s = -0.999 + 0.1816 * k as f64;
            let th = 0.37 + 0.5 * k as f64;
            let us = sbt_surface_velocity(&b, &f, s, th, &q).unwrap();
            let x = b.surface_point(b.stretch.phi(s), th).unwrap();
            let up = sbt_velocity(&b, &f, &x, &q).unwrap();
            assert!((us - up).norm() <= 1e-12 * up.norm().max(1e-3), "s={s}: {us} vs {up}");
        }
    }

    #[test]
    fn rotation_equivariance() {
        let spec = GeometrySpec {
            centerline: crate::geometry::spec::CenterlineSpec::Helix { radius: 0.5, pitch: 3.0 },
            frame: Default::default(),
            ..GeometrySpec::straight_prolate(0.05)
        };
        let b = spec.build().unwrap();
        let q_rot = GMat3::new(0.36, 0.48, -0.8, -0.8, 0.6, 0.0, 0.48, 0.64, 0.6);
        let br = b.rotated(&q_rot).unwrap();
        let d = Vec3::new(0.2, -1.0, 0.4);
        let f = ForceDensity::parabolic(d);
        let fr = ForceDensity::parabolic(q_rot * d);
        let quad = QuadratureSpec::default();
        let x = Vec3::new(0.9, 0.3, -0.2);
        let u = sbt_velocity(&b, &f, &x, &quad).unwrap();
        let ur = sbt_velocity(&br, &fr, &(q_rot * x), &quad).unwrap();
        assert!((ur - q_rot * u).norm() < 1e-10 * u.norm());
        // surface points and normals rotate as well
        let p = b.surface_point(0.3, 1.1).unwrap();
        let pr = br.surface_point(0.3, 1.1).unwrap();
        assert!((pr - q_rot * p).norm() < 1e-10);
        let n = b.surface_normal(0.3, 1.1).unwrap();
        assert!((br.surface_normal(0.3, 1.1).unwrap() - q_rot * n).norm() < 1e-10);
    }
}
