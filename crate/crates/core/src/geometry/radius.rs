//! Radius profiles a(φ) on [-η_ε, η_ε] and the admissibility validator.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, SbtError};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum RadiusKind {
    Prolate,
    HemisphericalCap,
    /// User-supplied profile with its derivative and endpoint η.
    Custom {
        a: ScalarFn,
        a_prime: ScalarFn,
    },
}

impl fmt::Debug for RadiusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl RadiusKind {
    pub fn tag(&self) -> &'static str {
        match self {
            RadiusKind::Prolate => "prolate",
            RadiusKind::HemisphericalCap => "hemispherical-cap",
            RadiusKind::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadiusProfile {
    pub kind: RadiusKind,
    pub epsilon: f64,
    pub eta: f64,
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(SbtError::input(format!("epsilon must lie in (0, 0.25], got {eps}")));
    }
    Ok(())
}

impl RadiusProfile {
    pub fn preset(kind: &str, epsilon: f64) -> Result<Self> {
        match kind {
            "prolate" => Self::prolate(epsilon),
            "hemispherical-cap" => Self::hemispherical_cap(epsilon),
            other => Err(SbtError::input(format!("unknown radius kind '{other}'"))),
        }
    }

    /// Prolate spheroid with foci at ±1.
    pub fn prolate(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(RadiusProfile { kind: RadiusKind::Prolate, epsilon, eta: (1.0 + epsilon * epsilon).sqrt() })
    }

    /// Cylinder of unit radius on [-1, 1] with hemispherical caps; only C^{1,1}.
    pub fn hemispherical_cap(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(RadiusProfile { kind: RadiusKind::HemisphericalCap, epsilon, eta: 1.0 + epsilon })
    }

    pub fn custom(epsilon: f64, eta: f64, a: ScalarFn, a_prime: ScalarFn) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(eta > 1.0 && eta < 1.5) {
            return Err(SbtError::input(format!("eta must lie in (1, 3/2), got {eta}")));
        }
        Ok(RadiusProfile { kind: RadiusKind::Custom { a, a_prime }, epsilon, eta })
    }

    /// a(φ); zero for |φ| ≥ η.
    pub fn a(&self, phi: f64) -> f64 {
        if phi.abs() >= self.eta {
            if let RadiusKind::Custom { a, .. } = &self.kind {
                return a(phi.signum() * self.eta);
            }
            return 0.0;
        }
        let e = self.epsilon;
        match &self.kind {
            RadiusKind::Prolate => (1.0 + e * e - phi * phi).max(0.0).sqrt() / (1.0 + e * e).sqrt(),
            RadiusKind::HemisphericalCap => {
                let u = phi.abs() - 1.0;
                if u <= 0.0 {
                    1.0
                } else {
                    (e * e - u * u).max(0.0).sqrt() / e
                }
            }
            RadiusKind::Custom { a, .. } => a(phi),
        }
    }

    /// a′(φ) on the open interval.
    pub fn a_prime(&self, phi: f64) -> f64 {
        let e = self.epsilon;
        match &self.kind {
            RadiusKind::Prolate => -phi / ((1.0 + e * e).sqrt() * (1.0 + e * e - phi * phi).sqrt()),
            RadiusKind::HemisphericalCap => {
                let u = phi.abs() - 1.0;
                if u <= 0.0 {
                    0.0
                } else {
                    -phi.signum() * u / (e * (e * e - u * u).sqrt())
                }
            }
            RadiusKind::Custom { a_prime, .. } => a_prime(phi),
        }
    }

    pub fn is_hemispherical(&self) -> bool {
        matches!(self.kind, RadiusKind::HemisphericalCap)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusConstants {
    pub delta_a: f64,
    pub c_a: f64,
    pub a0: f64,
    pub c_bar_a: f64,
    pub c_eta: f64,
    pub c_eta0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub kind: &'static str,
    pub epsilon: f64,
    pub eta: f64,
    pub conditions: Vec<ConditionResult>,
    pub constants: RadiusConstants,
    /// Set for the hemispherical-cap preset, which is only C^{1,1}.
    pub relaxed_smoothness: bool,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn condition(&self, id: u8) -> &ConditionResult {
        &self.conditions[(id - 1) as usize]
    }
}

/// Largest jump between neighbouring second differences of a′ on a uniform
/// grid of `n` intervals over [-L, L].
fn second_derivative_jump(p: &RadiusProfile, half: f64, n: usize) -> f64 {
    let h = 2.0 * half / n as f64;
    let ap: Vec<f64> = (0..=n).map(|k| p.a_prime(-half + h * k as f64)).collect();
    let app: Vec<f64> = ap.windows(3).map(|w| (w[2] - w[0]) / (2.0 * h)).collect();
    app.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
}

/// Checks the four admissibility conditions on a grid of `grid` points and
/// measures the associated constants.
pub fn validate_admissible_radius(p: &RadiusProfile, grid: usize) -> AdmissibilityReport {
    let grid = grid.max(10_000);
    let eps = p.epsilon;
    let eta = p.eta;
    let phis: Vec<f64> = (1..grid).map(|k| -eta + 2.0 * eta * k as f64 / grid as f64).collect();
    let avals: Vec<f64> = phis.iter().map(|&x| p.a(x)).collect();

    // (1) smoothness: a jump in a″ keeps the neighbour differences of a″ from
    // shrinking under refinement.
    let half = eta - 0.5 * eps;
    let j1 = second_derivative_jump(p, half, 20_000);
    let j2 = second_derivative_jump(p, half, 40_000);
    let smooth = j1.is_finite() && j2.is_finite() && !(j2 > 1e-6 && j2 > 0.75 * j1);
    let cond1 = ConditionResult { id: 1, name: "smoothness", pass: smooth, detail: format!("a'' neighbour jump {j1:.3e} -> {j2:.3e} under grid halving") };

    // (2) spheroidal endpoints, monotone decay.
    let end_vals = (p.a(-eta), p.a(eta));
    let vanishes = end_vals.0.abs() < 1e-12 && end_vals.1.abs() < 1e-12;
    let monotone_beyond = |lim: f64| {
        let mut ok = true;
        // right end: non-increasing in φ; left end: non-decreasing.
        let mut prev_r = f64::INFINITY;
        let mut prev_l = f64::INFINITY;
        for (i, &x) in phis.iter().enumerate() {
            if x > lim {
                if avals[i] > prev_r + 1e-14 {
                    ok = false;
                }
                prev_r = avals[i];
            }
        }
        for (i, &x) in phis.iter().enumerate().rev() {
            if x < -lim {
                if avals[i] > prev_l + 1e-14 {
                    ok = false;
                }
                prev_l = avals[i];
            }
        }
        ok
    };
    let mut delta_a = f64::NAN;
    let mut d = 0.5;
    while d > 1e-3 {
        if monotone_beyond(1.0 - d) {
            delta_a = d;
            break;
        }
        d *= 0.5;
    }
    let mut c_a = f64::NAN;
    if delta_a.is_finite() {
        c_a = 0.0;
        for (i, &x) in phis.iter().enumerate() {
            if x.abs() >= 1.0 - delta_a {
                let sph = (eta * eta - x * x).sqrt();
                if sph > 0.0 {
                    c_a = f64::max(c_a, (avals[i] - sph).abs() / (eps * eps * sph));
                }
            }
        }
    }
    let cond2_pass = vanishes && delta_a.is_finite() && c_a.is_finite();
    let cond2 = ConditionResult {
        id: 2,
        name: "spheroidal-endpoints",
        pass: cond2_pass,
        detail: if !vanishes {
            format!("a(+-eta) = ({:.3e}, {:.3e}) does not vanish", end_vals.0, end_vals.1)
        } else if !delta_a.is_finite() {
            "no endpoint window with monotone decay".to_string()
        } else {
            format!("delta_a = {delta_a}, c_a = {c_a:.6e}")
        },
    };

    // (3) positivity, bounded by one, and a₀.
    let positive = avals.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-14);
    let window = if delta_a.is_finite() { 1.0 - delta_a } else { 0.5 };
    let a0 = phis.iter().zip(&avals).filter(|(x, _)| x.abs() < window).map(|(_, &v)| v).fold(f64::INFINITY, f64::min);
    let cond3 = ConditionResult {
        id: 3,
        name: "non-vanishing",
        pass: positive && a0 > 0.0,
        detail: format!("min a on |phi| < {window} is {a0:.6e}; 0 < a <= 1 on grid: {positive}"),
    };

    // (4) controlled derivative.
    let c_bar_a = phis.iter().zip(&avals).map(|(&x, &v)| (v * p.a_prime(x)).abs()).fold(0.0, f64::max);
    let cond4 = ConditionResult { id: 4, name: "controlled-derivative", pass: c_bar_a.is_finite(), detail: format!("sup |a a'| = {c_bar_a:.6e}") };

    let c_eta = (eta - 1.0) / (eps * eps);
    AdmissibilityReport {
        kind: p.kind.tag(),
        epsilon: eps,
        eta,
        conditions: vec![cond1, cond2, cond3, cond4],
        constants: RadiusConstants { delta_a, c_a, a0, c_bar_a, c_eta, c_eta0: c_eta },
        relaxed_smoothness: p.is_hemispherical(),
    }
}
