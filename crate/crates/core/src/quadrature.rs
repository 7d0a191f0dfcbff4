//! Gauss–Legendre rules, composite panel sets with geometric grading toward a
//! near-singular point, and a small adaptive integrator for scalar integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const MAX_GAUSS_NODES: usize = 64;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached Gauss–Legendre rule, 1 ≤ n ≤ 64.
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static TABLE: OnceLock<Vec<GaussRule>> = OnceLock::new();
    assert!((1..=MAX_GAUSS_NODES).contains(&n), "Gauss rule size {n} out of range");
    let table = TABLE.get_or_init(|| (0..=MAX_GAUSS_NODES).map(|k| GaussRule::compute(k.max(1))).collect());
    &table[n]
}

/// Ordered, contiguous list of panel breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Panels {
    pub breaks: Vec<f64>,
}

impl Panels {
    /// Uniform panels of width at most `max_width` on [lo, hi].
    pub fn uniform(lo: f64, hi: f64, max_width: f64) -> Self {
        let count = (((hi - lo) / max_width).ceil() as usize).max(1);
        let breaks = (0..=count).map(|k| lo + (hi - lo) * k as f64 / count as f64).collect();
        Panels { breaks }
    }

    /// Panels on [lo, hi] graded geometrically toward `center`.
    ///
    /// Inside the window [center - window, center + window] the breakpoints
    /// sit at center ± window / 2^k for k = 0..=levels; outside it the panels
    /// are uniform with width at most `max_width`.
    pub fn graded(lo: f64, hi: f64, center: f64, window: f64, levels: usize, max_width: f64) -> Self {
        let center = center.clamp(lo, hi);
        let mut breaks = Vec::new();
        let push_uniform = |breaks: &mut Vec<f64>, a: f64, b: f64| {
            if b - a <= 0.0 {
                return;
            }
            let count = (((b - a) / max_width).ceil() as usize).max(1);
            for k in 0..count {
                breaks.push(a + (b - a) * k as f64 / count as f64);
            }
        };

        let left_edge = (center - window).max(lo);
        let right_edge = (center + window).min(hi);
        push_uniform(&mut breaks, lo, left_edge);
        // Geometric part left of center, outermost first.
        if center > lo {
            let w = center - left_edge;
            for k in 0..=levels {
                let b = center - w / 2f64.powi(k as i32);
                if breaks.last().is_none_or(|&l| b > l) {
                    breaks.push(b);
                }
            }
        }
        if breaks.last().is_none_or(|&l| center > l) {
            breaks.push(center);
        }
        if center < hi {
            let w = right_edge - center;
            for k in (0..=levels).rev() {
                let b = center + w / 2f64.powi(k as i32);
                if b > *breaks.last().unwrap() {
                    breaks.push(b);
                }
            }
        }
        let mut tail = Vec::new();
        push_uniform(&mut tail, right_edge, hi);
        for b in tail {
            if b > *breaks.last().unwrap() {
                breaks.push(b);
            }
        }
        if hi > *breaks.last().unwrap() {
            breaks.push(hi);
        }
        Panels { breaks }
    }

    pub fn count(&self) -> usize {
        self.breaks.len().saturating_sub(1)
    }

    /// Expand into (node, weight) pairs using an n-point Gauss rule per panel.
    pub fn nodes(&self, n: usize) -> Vec<(f64, f64)> {
        let rule = gauss_legendre(n);
        let mut out = Vec::with_capacity(self.count() * n);
        for w in self.breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                out.push((mid + half * x, half * wt));
            }
        }
        out
    }
}

/// Fixed-rule composite integral of a scalar function over `panels`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(panels: &Panels, n: usize, mut f: F) -> f64 {
    panels.nodes(n).into_iter().map(|(x, w)| w * f(x)).sum()
}

/// Panels one adaptive call may split before it stops refining; a guard
/// against integrands whose round-off never meets the tolerance.
const ADAPTIVE_BUDGET: usize = 1 << 18;

/// Adaptive Gauss–Legendre: bisects until the 10-point estimate on a panel
/// agrees with the sum over its two halves to `tol` (absolute, scaled by the
/// panel's share of the interval).
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    fn rule10<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
        let rule = gauss_legendre(10);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }
    fn recurse<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: usize, budget: &mut usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = rule10(f, a, m);
        let right = rule10(f, m, b);
        let refined = left + right;
        if depth == 0 || *budget == 0 || (refined - whole).abs() <= tol.max(1e-15 * refined.abs()) {
            return refined;
        }
        *budget -= 1;
        recurse(f, a, m, left, 0.5 * tol, depth - 1, budget) + recurse(f, m, b, right, 0.5 * tol, depth - 1, budget)
    }
    if b == a {
        return 0.0;
    }
    let whole = rule10(f, a, b);
    let mut budget = ADAPTIVE_BUDGET;
    recurse(f, a, b, whole, tol, 48, &mut budget)
}

/// Chebyshev points of the first kind on [-1, 1], ascending; interior only.
pub fn chebyshev_roots(n: usize) -> Vec<f64> {
    (0..n).rev().map(|k| ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos()).collect()
}

/// Chebyshev extreme points on [-1, 1], ascending; includes ±1.
pub fn chebyshev_extrema(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).rev().map(|k| (k as f64 * PI / (n - 1) as f64).cos()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 33, 64] {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n} weight sum {wsum}");
            // degree 2n-1 monomial with even power: ∫x^{2k} = 2/(2k+1)
            let k = (2 * n - 1) / 2;
            let val: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(2 * k as i32)).sum();
            assert!((val - 2.0 / (2 * k + 1) as f64).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn graded_panels_are_ordered_and_cover_interval() {
        let p = Panels::graded(-1.0, 1.0, 0.3, 0.25, 10, 0.125);
        assert_eq!(p.breaks.first(), Some(&-1.0));
        assert_eq!(p.breaks.last(), Some(&1.0));
        assert!(p.breaks.windows(2).all(|w| w[1] > w[0]));
        assert!(p.breaks.contains(&0.3));
        // near-singular integrand resolved: ∫ dx / ((x-0.3)^2 + d^2)
        let d = 1e-4;
        let p = Panels::graded(-1.0, 1.0, 0.3, 0.25, 13, 0.125);
        let got = integrate_panels(&p, 16, |x| 1.0 / ((x - 0.3).powi(2) + d * d));
        let exact = ((0.7f64 / d).atan() + (1.3f64 / d).atan()) / d;
        assert!((got - exact).abs() / exact < 1e-12, "{got} vs {exact}");
    }

    #[test]
    fn graded_panels_at_interval_end() {
        let p = Panels::graded(-1.0, 1.0, 1.0, 0.25, 8, 0.125);
        assert!(p.breaks.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*p.breaks.last().unwrap(), 1.0);
        let q = Panels::graded(-1.0, 1.0, -1.0, 0.25, 8, 0.125);
        assert!(q.breaks.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(q.breaks[0], -1.0);
    }

    #[test]
    fn adaptive_handles_endpoint_log() {
        // ∫_0^1 -ln x dx = 1
        let v = adaptive(&mut |x: f64| -x.ln(), 0.0, 1.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn chebyshev_grids() {
        let r = chebyshev_roots(101);
        assert_eq!(r.len(), 101);
        assert!(r.iter().all(|s| s.abs() < 1.0));
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        let e = chebyshev_extrema(11);
        assert_eq!(e[0], -1.0);
        assert_eq!(e[10], 1.0);
    }
}
