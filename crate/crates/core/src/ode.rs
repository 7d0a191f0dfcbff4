//! Classical fourth-order Runge–Kutta step for vector-valued ODEs.

/// One RK4 step of y' = rhs(x, y) from x to x + h.
pub fn rk4_step<const N: usize, F>(rhs: &F, x: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let add = |a: &[f64; N], b: &[f64; N], s: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * b[i];
        }
        out
    };
    let k1 = rhs(x, y);
    let k2 = rhs(x + 0.5 * h, &add(y, &k1, 0.5 * h));
    let k3 = rhs(x + 0.5 * h, &add(y, &k2, 0.5 * h));
    let k4 = rhs(x + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential() {
        let rhs = |_x: f64, y: &[f64; 1]| [y[0]];
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let mut y = [1.0];
            for k in 0..n {
                y = rk4_step(&rhs, k as f64 * h, &y, h);
            }
            (y[0] - 1f64.exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
