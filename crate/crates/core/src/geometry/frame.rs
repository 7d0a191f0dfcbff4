//! Bishop (relatively parallel) frame along the centerline.

use super::centerline::{Centerline, Vec3, EXT_HALF_LENGTH};
use crate::error::{Result, SbtError};
use crate::ode::rk4_step;

/// Frame at one arclength value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub phi: f64,
    pub t: Vec3,
    pub n1: Vec3,
    pub n2: Vec3,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Frame {
    /// e_ρ(θ) = cos θ e_{n1} + sin θ e_{n2}.
    pub fn e_rho(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.n1 * c + self.n2 * s
    }

    /// e_θ(θ) = −sin θ e_{n1} + cos θ e_{n2}.
    pub fn e_theta(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.n2 * c - self.n1 * s
    }

    /// κ̂(θ) = κ₁ cos θ + κ₂ sin θ.
    pub fn kappa_hat(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.kappa1 * c + self.kappa2 * s
    }
}

/// Sampled Bishop frame on a uniform grid over [-3/2, 3/2].
#[derive(Debug, Clone)]
pub struct FrameField {
    centerline: Centerline,
    lo: f64,
    step: f64,
    samples: Vec<Frame>,
}

impl FrameField {
    /// Integrates the frame equations with κ₃ = 0 from the left end using RK4.
    /// After each step the tangent is reset to the exact curve tangent and the
    /// normals are Gram–Schmidt re-orthonormalized.
    pub fn build(centerline: &Centerline, step: f64, seed_normal: Vec3) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && step <= 0.1) {
            return Err(SbtError::input(format!("frame step must lie in (0, 0.1], got {step}")));
        }
        let lo = -EXT_HALF_LENGTH;
        let hi = EXT_HALF_LENGTH;
        let count = ((hi - lo) / step).round() as usize;
        let h = (hi - lo) / count as f64;

        let t0 = centerline.tangent(lo);
        let seed_len = seed_normal.norm();
        if !(seed_len.is_finite() && seed_len > 0.0) {
            return Err(SbtError::input("seed normal must be a nonzero vector"));
        }
        let seed = seed_normal / seed_len;
        if seed.dot(&t0).abs() > 1e-10 {
            return Err(SbtError::input(format!("seed normal not perpendicular to the tangent at phi = {lo}: |n.t| = {:.3e}", seed.dot(&t0).abs())));
        }

        let rhs = |phi: f64, y: &[f64; 9]| -> [f64; 9] {
            let k = centerline.second_derivative(phi);
            let t = Vec3::new(y[0], y[1], y[2]);
            let n1 = Vec3::new(y[3], y[4], y[5]);
            let n2 = Vec3::new(y[6], y[7], y[8]);
            let k1 = k.dot(&n1);
            let k2 = k.dot(&n2);
            let dt = n1 * k1 + n2 * k2;
            let dn1 = -t * k1;
            let dn2 = -t * k2;
            [dt.x, dt.y, dt.z, dn1.x, dn1.y, dn1.z, dn2.x, dn2.y, dn2.z]
        };

        let mut samples = Vec::with_capacity(count + 1);
        let mut n1 = seed;
        for k in 0..=count {
            let phi = lo + h * k as f64;
            let (_, t, kv) = centerline.jet(phi);
            if !t.iter().all(|c| c.is_finite()) || (t.norm() - 1.0).abs() > 1e-6 {
                return Err(SbtError::geometry(format!("tangent undefined at phi = {phi}")));
            }
            n1 -= t * n1.dot(&t);
            let len = n1.norm();
            if !(len > 0.5) {
                return Err(SbtError::numerical(format!("frame collapsed at phi = {phi}")));
            }
            n1 /= len;
            let n2 = t.cross(&n1);
            samples.push(Frame { phi, t, n1, n2, kappa1: kv.dot(&n1), kappa2: kv.dot(&n2) });
            if k < count {
                let y = [t.x, t.y, t.z, n1.x, n1.y, n1.z, n2.x, n2.y, n2.z];
                let next = rk4_step(&rhs, phi, &y, h);
                n1 = Vec3::new(next[3], next[4], next[5]);
            }
        }
        Ok(FrameField { centerline: centerline.clone(), lo, step: h, samples })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[Frame] {
        &self.samples
    }

    pub fn centerline(&self) -> &Centerline {
        &self.centerline
    }

    /// Frame at arbitrary φ: cubic Hermite interpolation of e_{n1} using the
    /// frame equation for node derivatives, then re-orthonormalization
    /// against the exact tangent.
    pub fn at(&self, phi: f64) -> Frame {
        let phi = phi.clamp(self.lo, -self.lo);
        let (_, t, kv) = self.centerline.jet(phi);
        let pos = (phi - self.lo) / self.step;
        let i = (pos.floor() as usize).min(self.samples.len() - 2);
        let u = pos - i as f64;
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        let da = -a.t * a.kappa1;
        let db = -b.t * b.kappa1;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let mut n1 = a.n1 * h00 + da * (h10 * self.step) + b.n1 * h01 + db * (h11 * self.step);
        n1 -= t * n1.dot(&t);
        n1 /= n1.norm();
        let n2 = t.cross(&n1);
        Frame { phi, t, n1, n2, kappa1: kv.dot(&n1), kappa2: kv.dot(&n2) }
    }

    /// max over grid of |⟨e_i, e_j⟩ − δ_ij|.
    pub fn orthonormality_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|f| {
                let v = [f.t, f.n1, f.n2];
                let mut worst: f64 = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((v[i].dot(&v[j]) - target).abs());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    }

    /// max over grid of |√(κ₁²+κ₂²) − |X″||.
    pub fn curvature_mismatch(&self) -> f64 {
        self.samples
            .iter()
            .map(|f| ((f.kappa1 * f.kappa1 + f.kappa2 * f.kappa2).sqrt() - self.centerline.second_derivative(f.phi).norm()).abs())
            .fold(0.0, f64::max)
    }

    /// Twist rate e_{n1}′·e_{n2} estimated from neighbouring samples; zero for
    /// a Bishop frame.
    pub fn max_twist(&self) -> f64 {
        self.samples.windows(2).map(|w| ((w[1].n1.dot(&w[0].n2) - w[0].n1.dot(&w[1].n2)) / (2.0 * self.step)).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::centerline::Mat3;

    #[test]
    fn straight_frame_is_constant() {
        let c = Centerline::straight(Vec3::z()).unwrap();
        let f = FrameField::build(&c, 1e-2, Vec3::x()).unwrap();
        for s in f.samples() {
            assert_eq!(s.n1, Vec3::x());
            assert_eq!(s.n2, Vec3::y());
            assert_eq!((s.kappa1, s.kappa2), (0.0, 0.0));
        }
    }

    #[test]
    fn seed_must_be_perpendicular() {
        let c = Centerline::straight(Vec3::z()).unwrap();
        let err = FrameField::build(&c, 1e-2, Vec3::new(1.0, 0.0, 1e-6)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    /// For a planar arc the Bishop frame is the Frenet frame up to a constant
    /// rotation; starting from the in-plane normal it is the Frenet frame.
    fn arc_exact_n1(phi: f64, r: f64) -> Vec3 {
        let (s, c) = (phi / r).sin_cos();
        Vec3::new(-s, c, 0.0)
    }

    #[test]
    fn arc_frame_curvature() {
        let c = Centerline::circular_arc(2.0).unwrap();
        let seed = Vec3::new(0.3, 0.4, 0.8);
        let t0 = c.tangent(-1.5);
        let seed = seed - t0 * seed.dot(&t0);
        let f = FrameField::build(&c, 1e-3, seed).unwrap();
        assert!(f.orthonormality_drift() < 1e-12);
        for s in f.samples() {
            assert!((s.kappa1 * s.kappa1 + s.kappa2 * s.kappa2 - 0.25).abs() < 1e-8);
        }
        assert!(f.curvature_mismatch() < 1e-10);
    }

    #[test]
    fn arc_frame_converges_at_fourth_order() {
        let c = Centerline::circular_arc(2.0).unwrap();
        // rotate the seed out of plane: exact frame is a fixed rotation of Frenet
        let a = 0.7f64;
        let err = |h: f64| {
            let seed = arc_exact_n1(-1.5, 2.0) * a.cos() + Vec3::z() * a.sin();
            let f = FrameField::build(&c, h, seed).unwrap();
            f.samples().iter().map(|s| (s.n1 - (arc_exact_n1(s.phi, 2.0) * a.cos() + Vec3::z() * a.sin())).norm()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 > 8.0, "{e1} {e2}");
    }

    #[test]
    fn helix_frame_has_no_twist_and_matches_curvature() {
        let c = Centerline::helix(0.5, 1.5).unwrap();
        let t0 = c.tangent(-1.5);
        let seed = t0.cross(&Vec3::z());
        let f = FrameField::build(&c, 1e-3, seed).unwrap();
        assert!(f.orthonormality_drift() < 1e-12);
        assert!(f.curvature_mismatch() < 1e-10);
        // relative parallelism: d e_{n1}/dφ has no e_{n2} component
        assert!(f.max_twist() < 1e-6, "{}", f.max_twist());
    }

    #[test]
    fn off_grid_queries_interpolate() {
        let c = Centerline::helix(0.5, 1.5).unwrap();
        let seed = c.tangent(-1.5).cross(&Vec3::z());
        let coarse = FrameField::build(&c, 1e-2, seed).unwrap();
        let fine = FrameField::build(&c, 1e-4, seed).unwrap();
        for k in 0..40 {
            let p = -1.49 + 0.0747 * k as f64;
            let a = coarse.at(p);
            let b = fine.at(p);
            assert!((a.n1 - b.n1).norm() < 1e-8, "{p}");
            assert!(a.n1.dot(&a.t).abs() < 1e-14);
        }
    }

    #[test]
    fn frame_rotates_with_curve() {
        let q = Mat3::new(0.36, 0.48, -0.8, -0.8, 0.6, 0.0, 0.48, 0.64, 0.6);
        let c = Centerline::helix(0.5, 1.5).unwrap();
        let seed = c.tangent(-1.5).cross(&Vec3::z());
        let f = FrameField::build(&c, 1e-2, seed).unwrap();
        let g = FrameField::build(&c.rotated(&q), 1e-2, q * seed).unwrap();
        for p in [-1.2, 0.0, 0.77] {
            assert!((g.at(p).n1 - q * f.at(p).n1).norm() < 1e-12);
        }
    }
}
