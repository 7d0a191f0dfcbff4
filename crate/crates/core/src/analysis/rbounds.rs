//! Random sampling of |R| against √(s̄² + ε²a²).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::SlenderBody;

/// Round-off slack on the upper bound, relative to the sampled lengths.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RBoundsReport {
    pub samples: usize,
    pub seed: u64,
    pub kappa_max: f64,
    pub c_gamma: f64,
    /// max of ||R| − √(s̄²+ε²a²)| − (κ_max/2) s̄²; non-positive when the
    /// upper bound holds everywhere.
    pub max_upper_excess: f64,
    pub upper_pass: bool,
    /// min of |R| / √(s̄²+ε²a²).
    pub lower_constant: f64,
}

/// Samples s ∈ (−1, 1), t ∈ [−1, 1] (so s̄ = φ(s) − t) and θ ∈ [0, 2π).
pub fn check_r_bounds(body: &SlenderBody, sample_count: usize, seed: u64) -> RBoundsReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let km = body.centerline.kappa_max();
    let mut excess = f64::NEG_INFINITY;
    let mut lower = f64::INFINITY;
    let mut pass = true;
    for _ in 0..sample_count {
        let s: f64 = rng.gen_range(-1.0..1.0);
        let t: f64 = rng.gen_range(-1.0..=1.0);
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let phi = body.stretch.phi(s);
        let ea = body.epsilon * body.radius.a(phi);
        let sb = phi - t;
        let r = body.centerline.position(phi) - body.centerline.position(t) + body.frame_at(phi).e_rho(theta) * ea;
        let rn = r.norm();
        let flat = (sb * sb + ea * ea).sqrt();
        let e = (rn - flat).abs() - 0.5 * km * sb * sb;
        excess = excess.max(e);
        if e > SLACK * flat.max(1.0) {
            pass = false;
        }
        lower = lower.min(rn / flat);
    }
    RBoundsReport {
        samples: sample_count,
        seed,
        kappa_max: km,
        c_gamma: body.centerline.c_gamma(),
        max_upper_excess: excess,
        upper_pass: pass,
        lower_constant: lower,
    }
}
