//! Stretch maps φ(s) from the effective centerline to the full fiber.

use std::fmt;

use serde::Serialize;

use super::radius::ScalarFn;
use crate::error::{Result, SbtError};

#[derive(Clone)]
pub enum StretchMap {
    /// φ(s) = η s.
    Uniform {
        eta: f64,
    },
    Custom {
        phi: ScalarFn,
        dphi: ScalarFn,
    },
}

impl fmt::Debug for StretchMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StretchMap::Uniform { eta } => write!(f, "Uniform {{ eta: {eta} }}"),
            StretchMap::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl StretchMap {
    pub fn uniform(eta: f64) -> Result<Self> {
        if !(eta > 1.0 && eta < 1.5) {
            return Err(SbtError::input(format!("eta must lie in (1, 3/2), got {eta}")));
        }
        Ok(StretchMap::Uniform { eta })
    }

    pub fn phi(&self, s: f64) -> f64 {
        match self {
            StretchMap::Uniform { eta } => eta * s,
            StretchMap::Custom { phi, .. } => phi(s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            StretchMap::Uniform { eta } => *eta,
            StretchMap::Custom { dphi, .. } => dphi(s),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StretchReport {
    pub bijective: bool,
    pub odd: bool,
    /// max(|φ(s) − s|, |φ′(s) − 1|) / ε² over the grid.
    pub c_phi: f64,
    pub pass: bool,
}

/// Checks monotonicity onto [-η, η], oddness, and measures c_φ.
pub fn validate_stretch(map: &StretchMap, eta: f64, epsilon: f64, grid: usize) -> StretchReport {
    let grid = grid.max(100);
    let s: Vec<f64> = (0..=grid).map(|k| -1.0 + 2.0 * k as f64 / grid as f64).collect();
    let phi: Vec<f64> = s.iter().map(|&x| map.phi(x)).collect();
    let tol = 1e-12;
    let bijective = phi.windows(2).all(|w| w[1] > w[0]) && (phi[0] + eta).abs() < tol && (phi[grid] - eta).abs() < tol;
    let odd = s.iter().zip(&phi).all(|(&x, &p)| (map.phi(-x) + p).abs() < tol);
    let c_phi = s.iter().zip(&phi).map(|(&x, &p)| f64::max((p - x).abs(), (map.derivative(x) - 1.0).abs())).fold(0.0, f64::max) / (epsilon * epsilon);
    StretchReport { bijective, odd, c_phi, pass: bijective && odd && c_phi.is_finite() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn uniform_stretch() {
        let eta = 1.01f64.sqrt();
        let m = StretchMap::uniform(eta).unwrap();
        assert_eq!(m.phi(1.0), eta);
        assert_eq!(m.phi(0.0), 0.0);
        let r = validate_stretch(&m, eta, 0.1, 1000);
        assert!(r.pass);
        assert!(r.c_phi * 0.01 <= eta - 1.0 + 1e-15);
        assert!(r.c_phi <= 0.5);
    }

    #[test]
    fn shifted_map_is_not_odd() {
        let eps = 0.1;
        let m = StretchMap::Custom { phi: Arc::new(move |s| s + eps), dphi: Arc::new(|_| 1.0) };
        let r = validate_stretch(&m, 1.01f64.sqrt(), eps, 1000);
        assert!(!r.odd);
        assert!(!r.pass);
    }
}
