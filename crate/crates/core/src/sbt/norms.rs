//! C¹, C_a and L²_a norms of a force density.

use serde::Serialize;

use super::force::ForceDensity;
use crate::quadrature::{adaptive, chebyshev_extrema, gauss_legendre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayNorms {
    pub c1_norm: f64,
    /// +∞ when |f|/√(1−s²) diverges at an endpoint.
    pub ca_norm: f64,
    pub l2a_norm: f64,
}

/// Width of the endpoint panels where the log weight is integrated
/// semi-analytically.
const TAIL: f64 = 1e-3;

/// ∫₀^δ −log(u(2−u)) du.
fn log_tail(d: f64) -> f64 {
    -(d * d.ln() - d) - (2.0 * 2f64.ln() - (2.0 - d) * (2.0 - d).ln() - d)
}

pub fn decay_norms(force: &ForceDensity, grid_size: usize) -> DecayNorms {
    // odd count keeps s = 0 on the grid
    let n = grid_size.max(1000) | 1;
    let grid = chebyshev_extrema(n);
    let sup_f = grid.iter().map(|&s| force.value(s).norm()).fold(0.0, f64::max);
    let sup_fp = grid.iter().map(|&s| force.derivative(s).norm()).fold(0.0, f64::max);

    // C_a: sup over interior points; divergence when the last decade of
    // endpoint distance raises the running sup by more than 1.5x.
    let interior: Vec<f64> = grid[1..n - 1].to_vec();
    let ratio = |s: f64| force.value(s).norm() / (1.0 - s * s).sqrt();
    let gap_min = interior.iter().map(|&s| 1.0 - s.abs()).fold(f64::INFINITY, f64::min);
    let sup_all = interior.iter().map(|&s| ratio(s)).fold(0.0, f64::max);
    let sup_outer = interior.iter().filter(|&&s| 1.0 - s.abs() >= 10.0 * gap_min).map(|&s| ratio(s)).fold(0.0, f64::max);
    let ca_norm = if sup_all > 1.5 * sup_outer && sup_all > 0.0 { f64::INFINITY } else { sup_all };

    // L²_a: smooth interior by adaptive quadrature, endpoint panels by
    // subtracting the endpoint value and integrating the log exactly.
    let g = |s: f64| force.value(s).norm_squared();
    let mut inner = |s: f64| g(s) * -(1.0 - s * s).ln();
    let mid = adaptive(&mut inner, -1.0 + TAIL, 1.0 - TAIL, 1e-14);
    let rule = gauss_legendre(32);
    let mut tails = 0.0;
    for side in [-1.0, 1.0] {
        let g0 = g(side);
        let at = |u: f64| g(side * (1.0 - u));
        // u = δ v², v ∈ [0, 1]
        let rem: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| {
                let v = 0.5 * (x + 1.0);
                let u = TAIL * v * v;
                0.5 * w * 2.0 * TAIL * v * (at(u) - g0) * -(u * (2.0 - u)).ln()
            })
            .sum();
        tails += g0 * log_tail(TAIL) + rem;
    }
    DecayNorms { c1_norm: sup_f + sup_fp, ca_norm, l2a_norm: (mid + tails).max(0.0).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use std::sync::Arc;

    #[test]
    fn constant_force() {
        let n = decay_norms(&ForceDensity::constant(Vector3::x()), 2000);
        assert_eq!(n.c1_norm, 1.0);
        assert!(n.ca_norm.is_infinite());
        assert!((n.l2a_norm.powi(2) - (4.0 - 4.0 * 2f64.ln())).abs() < 1e-10, "{}", n.l2a_norm.powi(2));
    }

    #[test]
    fn parabolic_force() {
        let n = decay_norms(&ForceDensity::parabolic(Vector3::x()), 2000);
        assert!((n.c1_norm - 3.0).abs() < 1e-15);
        assert!((n.ca_norm - 1.0).abs() < 1e-12);
        // ∫(1−s²)²(−log(1−s²)) ds = 2(71/45 − 16/15 ln 2)… check by brute force
        let mut h = |s: f64| (1.0 - s * s).powi(2) * -(1.0 - s * s).ln();
        let exact = crate::quadrature::adaptive(&mut h, -1.0, 1.0, 1e-15);
        assert!((n.l2a_norm.powi(2) - exact).abs() < 1e-10);
    }

    #[test]
    fn zero_force() {
        let n = decay_norms(&ForceDensity::zero(), 1000);
        assert_eq!((n.c1_norm, n.ca_norm, n.l2a_norm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn square_root_decay_is_bounded() {
        let f = ForceDensity::custom(
            Arc::new(|s: f64| Vector3::new((1.0 - s * s).max(0.0).sqrt(), 0.0, 0.0)),
            Arc::new(|s: f64| Vector3::new(-s / (1.0 - s * s).max(1e-300).sqrt(), 0.0, 0.0)),
        );
        let n = decay_norms(&f, 2000);
        assert!((n.ca_norm - 1.0).abs() < 1e-12);
    }
}
