//! Arclength-parameterized centerline presets on φ ∈ [-3/2, 3/2].

use nalgebra::{Matrix3, Vector3};

use crate::error::{Result, SbtError};
use crate::quadrature::gauss_legendre;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Half-length of the extended centerline domain.
pub const EXT_HALF_LENGTH: f64 = 1.5;

/// Below this the curve is treated as self-intersecting.
pub const MIN_C_GAMMA: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterlineKind {
    Straight,
    CircularArc,
    Helix,
    Spline,
}

#[derive(Debug, Clone)]
enum Shape {
    Straight { direction: Vec3 },
    CircularArc { radius: f64 },
    Helix { radius: f64, rise: f64, speed: f64 },
    Spline(ArclengthSpline),
}

/// Centerline curve X(φ) with unit-speed parameterization, plus the measured
/// non-intersection constant c_Γ and maximal curvature κ_max.
#[derive(Debug, Clone)]
pub struct Centerline {
    shape: Shape,
    rotation: Mat3,
    origin: Vec3,
    c_gamma: f64,
    kappa_max: f64,
}

impl Centerline {
    /// Straight line X(φ) = φ d.
    pub fn straight(direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(SbtError::input("straight centerline direction must be nonzero"));
        }
        Self::finish(Shape::Straight { direction: direction / n })
    }

    /// Planar arc of radius R in the xy-plane with X(0) = 0, e_t(0) = e₁.
    pub fn circular_arc(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SbtError::input("arc radius must be positive"));
        }
        Self::finish(Shape::CircularArc { radius })
    }

    /// Helix of the given radius and rise per full turn, centered on the z-axis.
    pub fn helix(radius: f64, pitch: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0 && pitch.is_finite()) {
            return Err(SbtError::input("helix radius must be positive and pitch finite"));
        }
        let rise = pitch / (2.0 * std::f64::consts::PI);
        let speed = (radius * radius + rise * rise).sqrt();
        Self::finish(Shape::Helix { radius, rise, speed })
    }

    /// Natural cubic spline through `nodes`, reparameterized by arclength and
    /// centered at the arclength midpoint. Total length must be at least 3.
    pub fn spline(nodes: &[Vec3]) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(SbtError::input(format!("spline needs at least 4 nodes, got {}", nodes.len())));
        }
        if nodes.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(SbtError::input("spline nodes must be finite"));
        }
        let spline = ArclengthSpline::new(nodes)?;
        Self::finish(Shape::Spline(spline))
    }

    fn finish(shape: Shape) -> Result<Self> {
        let mut c = Centerline { shape, rotation: Mat3::identity(), origin: Vec3::zeros(), c_gamma: 1.0, kappa_max: 0.0 };
        c.kappa_max = c.measure_kappa_max();
        c.c_gamma = c.measure_c_gamma();
        if c.c_gamma < MIN_C_GAMMA {
            return Err(SbtError::geometry(format!("centerline self-intersects (c_gamma = {:.3e})", c.c_gamma)));
        }
        Ok(c)
    }

    /// Rigidly rotated copy (about the origin).
    pub fn rotated(&self, rotation: &Mat3) -> Self {
        let mut c = self.clone();
        c.rotation = rotation * self.rotation;
        c.origin = rotation * self.origin;
        c
    }

    /// Rigidly translated copy.
    pub fn translated(&self, shift: &Vec3) -> Self {
        let mut c = self.clone();
        c.origin += shift;
        c
    }

    pub fn kind(&self) -> CenterlineKind {
        match self.shape {
            Shape::Straight { .. } => CenterlineKind::Straight,
            Shape::CircularArc { .. } => CenterlineKind::CircularArc,
            Shape::Helix { .. } => CenterlineKind::Helix,
            Shape::Spline(_) => CenterlineKind::Spline,
        }
    }

    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max
    }

    /// (X, X′, X″) at φ in the local (unrotated) frame.
    fn local_jet(&self, phi: f64) -> (Vec3, Vec3, Vec3) {
        match &self.shape {
            Shape::Straight { direction } => (direction * phi, *direction, Vec3::zeros()),
            Shape::CircularArc { radius } => {
                let r = *radius;
                let (s, c) = (phi / r).sin_cos();
                (Vec3::new(r * s, r * (1.0 - c), 0.0), Vec3::new(c, s, 0.0), Vec3::new(-s / r, c / r, 0.0))
            }
            Shape::Helix { radius, rise, speed } => {
                let w = 1.0 / speed;
                let (s, c) = (phi * w).sin_cos();
                (
                    Vec3::new(radius * c, radius * s, rise * phi * w),
                    Vec3::new(-radius * w * s, radius * w * c, rise * w),
                    Vec3::new(-radius * w * w * c, -radius * w * w * s, 0.0),
                )
            }
            Shape::Spline(sp) => sp.jet(phi),
        }
    }

    pub fn position(&self, phi: f64) -> Vec3 {
        self.origin + self.rotation * self.local_jet(phi).0
    }

    pub fn tangent(&self, phi: f64) -> Vec3 {
        self.rotation * self.local_jet(phi).1
    }

    pub fn second_derivative(&self, phi: f64) -> Vec3 {
        self.rotation * self.local_jet(phi).2
    }

    /// Position, unit tangent and second derivative in one call.
    pub fn jet(&self, phi: f64) -> (Vec3, Vec3, Vec3) {
        let (x, t, k) = self.local_jet(phi);
        (self.origin + self.rotation * x, self.rotation * t, self.rotation * k)
    }

    fn measure_kappa_max(&self) -> f64 {
        match &self.shape {
            Shape::Straight { .. } => 0.0,
            Shape::CircularArc { radius } => 1.0 / radius,
            Shape::Helix { radius, speed, .. } => radius / (speed * speed),
            Shape::Spline(_) => {
                let n = 3001;
                (0..n).map(|k| -EXT_HALF_LENGTH + 2.0 * EXT_HALF_LENGTH * k as f64 / (n - 1) as f64).map(|p| self.local_jet(p).2.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// inf |X(φ₁) − X(φ₂)| / |φ₁ − φ₂| over a uniform grid of pairs.
    fn measure_c_gamma(&self) -> f64 {
        if matches!(self.shape, Shape::Straight { .. }) {
            return 1.0;
        }
        let n = 301;
        let grid: Vec<f64> = (0..n).map(|k| -EXT_HALF_LENGTH + 2.0 * EXT_HALF_LENGTH * k as f64 / (n - 1) as f64).collect();
        let pts: Vec<Vec3> = grid.iter().map(|&p| self.local_jet(p).0).collect();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let r = (pts[i] - pts[j]).norm() / (grid[j] - grid[i]);
                best = best.min(r);
            }
        }
        best
    }

    /// Closest point parameter to `x` over φ ∈ [lo, hi]: coarse scan then
    /// safeguarded Newton on (X(φ) − x)·e_t(φ) = 0.
    pub fn closest_parameter(&self, x: &Vec3, lo: f64, hi: f64) -> (f64, f64) {
        let n = 200;
        let mut best = (lo, f64::INFINITY);
        for k in 0..=n {
            let p = lo + (hi - lo) * k as f64 / n as f64;
            let d = (self.position(p) - x).norm_squared();
            if d < best.1 {
                best = (p, d);
            }
        }
        let h = (hi - lo) / n as f64;
        let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
        let mut p = best.0;
        for _ in 0..60 {
            let (xp, t, k) = self.jet(p);
            let r = xp - x;
            let g = r.dot(&t);
            let dg = 1.0 + r.dot(&k);
            if g > 0.0 {
                b = p;
            } else {
                a = p;
            }
            let mut next = if dg > 0.0 { p - g / dg } else { 0.5 * (a + b) };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - p).abs() < 1e-15 {
                p = next;
                break;
            }
            p = next;
            if b - a < 1e-15 {
                break;
            }
        }
        // Endpoints may still win when the minimum is at the boundary.
        let mut cand = [(p, (self.position(p) - x).norm()), (lo, (self.position(lo) - x).norm()), (hi, (self.position(hi) - x).norm())];
        cand.sort_by(|u, v| u.1.total_cmp(&v.1));
        cand[0]
    }
}

/// Natural cubic spline in chord-length parameter u with an arclength table.
#[derive(Debug, Clone)]
struct ArclengthSpline {
    knots: Vec<f64>,
    coeffs: Vec<[Vec3; 4]>,
    /// Cumulative arclength at each knot.
    cumulative: Vec<f64>,
    mid_length: f64,
    anchor: Vec3,
}

impl ArclengthSpline {
    fn new(nodes: &[Vec3]) -> Result<Self> {
        let n = nodes.len();
        let mut knots = vec![0.0; n];
        for i in 1..n {
            let d = (nodes[i] - nodes[i - 1]).norm();
            if d <= 1e-12 {
                return Err(SbtError::geometry("repeated spline node: tangent undefined"));
            }
            knots[i] = knots[i - 1] + d;
        }
        // Natural spline second derivatives M_i, tridiagonal solve per component.
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let mut m = vec![Vec3::zeros(); n];
        if n > 2 {
            let size = n - 2;
            let mut diag = vec![0.0; size];
            let mut upper = vec![0.0; size];
            let mut rhs = vec![Vec3::zeros(); size];
            for i in 0..size {
                let k = i + 1;
                diag[i] = 2.0 * (h[k - 1] + h[k]);
                upper[i] = h[k];
                rhs[i] = 6.0 * ((nodes[k + 1] - nodes[k]) / h[k] - (nodes[k] - nodes[k - 1]) / h[k - 1]);
            }
            for i in 1..size {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= prev * w;
            }
            let mut sol = vec![Vec3::zeros(); size];
            sol[size - 1] = rhs[size - 1] / diag[size - 1];
            for i in (0..size - 1).rev() {
                sol[i] = (rhs[i] - sol[i + 1] * upper[i]) / diag[i];
            }
            m[1..(size + 1)].copy_from_slice(&sol[..size]);
        }
        let coeffs: Vec<[Vec3; 4]> = (0..n - 1)
            .map(|i| {
                let hi = h[i];
                let a = nodes[i];
                let b = (nodes[i + 1] - nodes[i]) / hi - hi * (2.0 * m[i] + m[i + 1]) / 6.0;
                let c = m[i] / 2.0;
                let d = (m[i + 1] - m[i]) / (6.0 * hi);
                [a, b, c, d]
            })
            .collect();
        let mut sp = ArclengthSpline { knots, coeffs, cumulative: vec![0.0; n], mid_length: 0.0, anchor: Vec3::zeros() };
        for i in 0..n - 1 {
            let len = sp.segment_length(i, sp.knots[i + 1]);
            sp.cumulative[i + 1] = sp.cumulative[i] + len;
        }
        // Zero speed anywhere means the tangent is undefined.
        for i in 0..n - 1 {
            for k in 0..=32 {
                let u = sp.knots[i] + (sp.knots[i + 1] - sp.knots[i]) * k as f64 / 32.0;
                if sp.derivs(u).1.norm() < 1e-8 {
                    return Err(SbtError::geometry("spline has vanishing speed: tangent undefined"));
                }
            }
        }
        let total = sp.cumulative[n - 1];
        if total < 2.0 * EXT_HALF_LENGTH {
            return Err(SbtError::input(format!("spline arclength {total:.4} shorter than required 3")));
        }
        sp.mid_length = 0.5 * total;
        sp.anchor = sp.derivs(sp.invert(sp.mid_length)).0;
        Ok(sp)
    }

    fn segment(&self, u: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.total_cmp(&u)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// P(u), P′(u), P″(u).
    fn derivs(&self, u: f64) -> (Vec3, Vec3, Vec3) {
        let i = self.segment(u);
        let [a, b, c, d] = self.coeffs[i];
        let x = u - self.knots[i];
        (a + x * (b + x * (c + x * d)), b + x * (2.0 * c + 3.0 * x * d), 2.0 * c + 6.0 * x * d)
    }

    /// Arclength from the start of segment i up to u (u inside segment i).
    fn segment_length(&self, i: usize, u: f64) -> f64 {
        let a = self.knots[i];
        let rule = gauss_legendre(24);
        let half = 0.5 * (u - a);
        let mid = 0.5 * (u + a);
        let [_, b, c, d] = self.coeffs[i];
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| {
                let t = mid + half * x - a;
                w * (b + t * (2.0 * c + 3.0 * t * d)).norm()
            })
            .sum::<f64>()
            * half
    }

    /// Chord parameter at arclength ℓ: bracketed Newton.
    fn invert(&self, ell: f64) -> f64 {
        let n = self.knots.len();
        let ell = ell.clamp(0.0, self.cumulative[n - 1]);
        let i = match self.cumulative.binary_search_by(|k| k.total_cmp(&ell)) {
            Ok(i) => return self.knots[i],
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let (mut a, mut b) = (self.knots[i], self.knots[i + 1]);
        let frac = (ell - self.cumulative[i]) / (self.cumulative[i + 1] - self.cumulative[i]);
        let mut u = a + frac * (b - a);
        for _ in 0..60 {
            let g = self.cumulative[i] + self.segment_length(i, u) - ell;
            if g > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let speed = self.derivs(u).1.norm();
            let mut next = u - g / speed;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - u).abs() <= 1e-15 * (1.0 + u.abs()) {
                return next;
            }
            u = next;
        }
        u
    }

    /// Unit-speed jet at arclength φ measured from the midpoint.
    fn jet(&self, phi: f64) -> (Vec3, Vec3, Vec3) {
        let u = self.invert(self.mid_length + phi);
        let (p, dp, ddp) = self.derivs(u);
        let speed = dp.norm();
        let t = dp / speed;
        let k = (ddp - t * ddp.dot(&t)) / (speed * speed);
        (p - self.anchor, t, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helical_nodes(perturb: f64) -> Vec<Vec3> {
        (0..9)
            .map(|k| {
                let t = k as f64 * 0.6;
                let wiggle = perturb * ((k * 7 % 5) as f64 - 2.0);
                Vec3::new(t.cos() + wiggle, t.sin(), 0.3 * t)
            })
            .collect()
    }

    #[test]
    fn straight_line_basics() {
        let c = Centerline::straight(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.position(0.5), Vec3::new(0.0, 0.0, 0.5));
        assert_eq!(c.tangent(0.3), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(c.kappa_max(), 0.0);
        assert_eq!(c.c_gamma(), 1.0);
    }

    #[test]
    fn arc_curvature_and_c_gamma() {
        let c = Centerline::circular_arc(2.0).unwrap();
        for k in 0..31 {
            let p = -1.5 + 0.1 * k as f64;
            assert!((c.second_derivative(p).norm() - 0.5).abs() < 1e-14);
            assert!((c.tangent(p).norm() - 1.0).abs() < 1e-14);
            // lies on circle of radius 2 centered at (0, 2, 0)
            assert!(((c.position(p) - Vec3::new(0.0, 2.0, 0.0)).norm() - 2.0).abs() < 1e-14);
        }
        let expected = 0.75f64.sin() / 0.75;
        assert!((c.c_gamma() - expected).abs() < 1e-10, "{}", c.c_gamma());
    }

    #[test]
    fn tight_arc_is_rejected() {
        // circumference below the domain length: the curve overlaps itself
        let err = Centerline::circular_arc(0.4).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn helix_is_unit_speed() {
        let c = Centerline::helix(0.5, 1.0).unwrap();
        let h = 1e-5;
        for k in 0..11 {
            let p = -1.4 + 0.28 * k as f64;
            let fd = (c.position(p + h) - c.position(p - h)) / (2.0 * h);
            assert!((fd - c.tangent(p)).norm() < 1e-9);
            assert!((c.tangent(p).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spline_reparameterized_to_arclength() {
        let c = Centerline::spline(&helical_nodes(0.05)).unwrap();
        assert!(c.position(0.0).norm() < 1e-12);
        let h = 1e-5;
        for k in 0..31 {
            let p = -1.5 + 0.1 * k as f64;
            let fd = (c.position((p + h).min(1.5)) - c.position((p - h).max(-1.5))).norm() / ((p + h).min(1.5) - (p - h).max(-1.5));
            assert!((fd - 1.0).abs() < 1e-6, "speed {fd} at {p}");
            assert!((c.tangent(p).norm() - 1.0).abs() < 1e-12);
            assert!(c.second_derivative(p).dot(&c.tangent(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn spline_needs_four_nodes_and_length() {
        let few = vec![Vec3::zeros(), Vec3::x(), Vec3::new(2.0, 0.0, 0.0)];
        assert_eq!(Centerline::spline(&few).unwrap_err().exit_code(), 1);
        let short: Vec<Vec3> = (0..5).map(|k| Vec3::new(0.1 * k as f64, 0.0, 0.0)).collect();
        assert_eq!(Centerline::spline(&short).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn self_intersecting_spline_rejected() {
        // one and a half turns of a circle shorter than the domain length
        let nodes: Vec<Vec3> = (0..13)
            .map(|k| {
                let t = k as f64 * std::f64::consts::FRAC_PI_4;
                Vec3::new(0.45 * t.cos(), 0.45 * t.sin(), 0.0)
            })
            .collect();
        assert_eq!(Centerline::spline(&nodes).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn closest_parameter_on_arc() {
        let c = Centerline::circular_arc(2.0).unwrap();
        let p = 0.37;
        let (_, t, k) = c.jet(p);
        let normal = k / k.norm();
        let x = c.position(p) - 0.2 * normal;
        let (q, d) = c.closest_parameter(&x, -1.5, 1.5);
        assert!((q - p).abs() < 1e-10 && (d - 0.2).abs() < 1e-12, "{q} {d}");
        let _ = t;
    }
}
