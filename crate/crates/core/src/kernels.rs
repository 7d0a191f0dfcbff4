//! Stokeslet, doublet and pressure kernels with analytic gradients.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Result, SbtError};

type Vec3 = Vector3<f64>;
type Mat3 = Matrix3<f64>;

/// Evaluations closer than this to the singularity are refused.
pub const SINGULAR_RADIUS: f64 = 1e-14;

fn guard(x: &Vec3) -> Result<f64> {
    let r = x.norm();
    if !(r >= SINGULAR_RADIUS) {
        return Err(SbtError::Singular(r));
    }
    Ok(r)
}

/// S(x) = I/|x| + x xᵀ/|x|³.
pub fn stokeslet(x: &Vec3) -> Result<Mat3> {
    let r = guard(x)?;
    Ok(Mat3::identity() / r + x * x.transpose() / (r * r * r))
}

/// D(x) = I/|x|³ − 3 x xᵀ/|x|⁵.
pub fn doublet(x: &Vec3) -> Result<Mat3> {
    let r = guard(x)?;
    let r2 = r * r;
    let r3 = r2 * r;
    Ok(Mat3::identity() / r3 - x * x.transpose() * (3.0 / (r3 * r2)))
}

/// p = x·f / (4π |x|³).
pub fn pressure_kernel(x: &Vec3, f: &Vec3) -> Result<f64> {
    let r = guard(x)?;
    Ok(x.dot(f) / (4.0 * std::f64::consts::PI * r * r * r))
}

/// Value and gradient of a matrix-valued kernel; `gradient[k]` holds ∂_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub value: Mat3,
    pub gradient: [Mat3; 3],
}

/// Analytic jets of S and D at x.
///
/// ∂_k S_ij = (−δ_ij x_k + δ_ik x_j + δ_jk x_i)/r³ − 3 x_i x_j x_k / r⁵
/// ∂_k D_ij = −3(δ_ij x_k + δ_ik x_j + δ_jk x_i)/r⁵ + 15 x_i x_j x_k / r⁷
pub fn kernel_jets(x: &Vec3) -> Result<(KernelJet, KernelJet)> {
    let r = guard(x)?;
    let r2 = r * r;
    let r3 = r2 * r;
    let r5 = r3 * r2;
    let r7 = r5 * r2;
    let xx = x * x.transpose();
    let s_val = Mat3::identity() / r + xx / r3;
    let d_val = Mat3::identity() / r3 - xx * (3.0 / r5);
    let mut gs = [Mat3::zeros(); 3];
    let mut gd = [Mat3::zeros(); 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let dij = if i == j { 1.0 } else { 0.0 };
                let dik = if i == k { 1.0 } else { 0.0 };
                let djk = if j == k { 1.0 } else { 0.0 };
                let xijk = x[i] * x[j] * x[k];
                gs[k][(i, j)] = (-dij * x[k] + dik * x[j] + djk * x[i]) / r3 - 3.0 * xijk / r5;
                gd[k][(i, j)] = -3.0 * (dij * x[k] + dik * x[j] + djk * x[i]) / r5 + 15.0 * xijk / r7;
            }
        }
    }
    Ok((KernelJet { value: s_val, gradient: gs }, KernelJet { value: d_val, gradient: gd }))
}

/// Contributions of one source to velocity and its Cartesian gradient:
/// returns (S f + c D f, ∇(S f + c D f)) with `grad[(i, k)] = ∂_k (·)_i`,
/// plus the pressure kernel x·f/|x|³ (without the 1/4π).
#[inline]
pub fn fused_velocity_gradient(x: &Vec3, f: &Vec3, c: f64) -> (Vec3, Mat3, f64) {
    let r2 = x.norm_squared();
    let r = r2.sqrt();
    let inv_r = 1.0 / r;
    let inv_r3 = inv_r / r2;
    let inv_r5 = inv_r3 / r2;
    let inv_r7 = inv_r5 / r2;
    let xf = x.dot(f);
    // S f = f/r + x (x·f)/r³ ; D f = f/r³ − 3 x (x·f)/r⁵
    let vel = f * (inv_r + c * inv_r3) + x * (xf * (inv_r3 - 3.0 * c * inv_r5));
    // ∂_k(S f)_i = (−f_i x_k + δ_ik (x·f) + x_i f_k)/r³ − 3 x_i x_k (x·f)/r⁵
    // ∂_k(D f)_i = −3(f_i x_k + δ_ik (x·f) + x_i f_k)/r⁵ + 15 x_i x_k (x·f)/r⁷
    let fx = f * x.transpose();
    let xf_t = x * f.transpose();
    let xx = x * x.transpose();
    let grad = fx * (-inv_r3 - 3.0 * c * inv_r5)
        + xf_t * (inv_r3 - 3.0 * c * inv_r5)
        + Mat3::identity() * (xf * (inv_r3 - 3.0 * c * inv_r5))
        + xx * (xf * (-3.0 * inv_r5 + 15.0 * c * inv_r7));
    (vel, grad, xf * inv_r3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn stokeslet_values() {
        assert_eq!(stokeslet(&Vec3::x()).unwrap(), Mat3::from_diagonal(&Vec3::new(2.0, 1.0, 1.0)));
        assert!(close(&stokeslet(&Vec3::new(0.0, 2.0, 0.0)).unwrap(), &Mat3::from_diagonal(&Vec3::new(0.5, 1.0, 0.5)), 1e-16));
        assert!(matches!(stokeslet(&Vec3::new(1e-15, 0.0, 0.0)), Err(SbtError::Singular(_))));
    }

    #[test]
    fn doublet_values() {
        assert_eq!(doublet(&Vec3::x()).unwrap(), Mat3::from_diagonal(&Vec3::new(-2.0, 1.0, 1.0)));
        assert!(close(&doublet(&Vec3::new(0.0, 0.0, 2.0)).unwrap(), &Mat3::from_diagonal(&Vec3::new(0.125, 0.125, -0.25)), 1e-16));
    }

    #[test]
    fn pressure_values() {
        let p = pressure_kernel(&Vec3::x(), &Vec3::x()).unwrap();
        assert!((p - 0.0795774715459477).abs() < 1e-15);
        assert_eq!(pressure_kernel(&Vec3::y(), &Vec3::x()).unwrap(), 0.0);
        let x = Vec3::new(0.3, -0.2, 0.9);
        let f = Vec3::new(1.0, 2.0, -0.5);
        let ratio = pressure_kernel(&x, &f).unwrap() / pressure_kernel(&(2.0 * x), &f).unwrap();
        assert!((ratio - 4.0).abs() < 1e-13);
    }

    fn laplacian_fd(x: &Vec3, h: f64) -> Mat3 {
        let mut lap = stokeslet(x).unwrap() * (-6.0);
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = h;
            lap += stokeslet(&(x + e)).unwrap() + stokeslet(&(x - e)).unwrap();
        }
        lap / (h * h)
    }

    #[test]
    fn doublet_is_half_laplacian_of_stokeslet() {
        let x = Vec3::new(1.0, 1.0, 1.0);
        let d = doublet(&x).unwrap();
        let e1 = (laplacian_fd(&x, 1e-2) * 0.5 - d).abs().max();
        let e2 = (laplacian_fd(&x, 5e-3) * 0.5 - d).abs().max();
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{e1} {e2}");
    }

    /// Five-point central difference of a matrix field along axis k.
    fn central5(field: fn(&Vec3) -> Result<Mat3>, x: &Vec3, k: usize, h: f64) -> Mat3 {
        let mut e = Vec3::zeros();
        e[k] = h;
        let at = |m: f64| field(&(x + e * m)).unwrap();
        (at(-2.0) - at(-1.0) * 8.0 + at(1.0) * 8.0 - at(2.0)) / (12.0 * h)
    }

    #[test]
    fn gradients_match_central_differences() {
        for x in [Vec3::x(), Vec3::new(0.3, -0.7, 0.5)] {
            let (js, jd) = kernel_jets(&x).unwrap();
            for k in 0..3 {
                assert!(close(&js.gradient[k], &central5(stokeslet, &x, k, 1e-4), 1e-8));
                assert!(close(&jd.gradient[k], &central5(doublet, &x, k, 1e-4), 1e-8 * jd.gradient[k].abs().max()));
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_even_and_homogeneous(x in prop::array::uniform3(-3.0f64..3.0)) {
            let x = Vec3::from(x);
            prop_assume!(x.norm() > 0.1);
            let s = stokeslet(&x).unwrap();
            let d = doublet(&x).unwrap();
            prop_assert!(close(&s, &s.transpose(), 0.0));
            prop_assert!(close(&d, &d.transpose(), 0.0));
            prop_assert!(close(&s, &stokeslet(&(-x)).unwrap(), 0.0));
            prop_assert!(close(&(stokeslet(&(2.0 * x)).unwrap() * 2.0), &s, 1e-12 * s.abs().max()));
            prop_assert!(close(&(doublet(&(2.0 * x)).unwrap() * 8.0), &d, 1e-12 * d.abs().max()));
            prop_assert!(d.trace().abs() <= 1e-12 * d.abs().max());
        }

        #[test]
        fn gradients_homogeneous_and_trace_free(x in prop::array::uniform3(-3.0f64..3.0)) {
            let x = Vec3::from(x);
            prop_assume!(x.norm() > 0.1);
            let (js, jd) = kernel_jets(&x).unwrap();
            let (js2, _) = kernel_jets(&(2.0 * x)).unwrap();
            for k in 0..3 {
                let scale = js.gradient[k].abs().max().max(1e-300);
                prop_assert!(close(&(js2.gradient[k] * 4.0), &js.gradient[k], 1e-12 * scale));
                prop_assert!(jd.gradient[k].trace().abs() <= 1e-12 * jd.gradient[k].abs().max().max(1.0));
            }
        }

        #[test]
        fn fused_matches_jets(x in prop::array::uniform3(-2.0f64..2.0), f in prop::array::uniform3(-1.0f64..1.0), c in 0.0f64..0.1) {
            let x = Vec3::from(x);
            let f = Vec3::from(f);
            prop_assume!(x.norm() > 0.1);
            let (js, jd) = kernel_jets(&x).unwrap();
            let (vel, grad, pk) = fused_velocity_gradient(&x, &f, c);
            let expect = js.value * f + jd.value * f * c;
            prop_assert!((vel - expect).norm() <= 1e-12 * expect.norm().max(1.0));
            for k in 0..3 {
                let col = js.gradient[k] * f + jd.gradient[k] * f * c;
                for i in 0..3 {
                    prop_assert!((grad[(i, k)] - col[i]).abs() <= 1e-11 * col.norm().max(1.0));
                }
            }
            let p = pressure_kernel(&x, &f).unwrap() * 4.0 * std::f64::consts::PI;
            prop_assert!((pk - p).abs() <= 1e-12 * p.abs().max(1.0));
        }

        #[test]
        fn stokeslet_field_divergence_free(x in prop::array::uniform3(-2.0f64..2.0), f in prop::array::uniform3(-1.0f64..1.0)) {
            let x = Vec3::from(x);
            let f = Vec3::from(f);
            prop_assume!(x.norm() > 0.5);
            let h = 1e-4;
            let mut div = 0.0;
            for k in 0..3 {
                let mut e = Vec3::zeros();
                e[k] = h;
                div += ((stokeslet(&(x + e)).unwrap() * f)[k] - (stokeslet(&(x - e)).unwrap() * f)[k]) / (2.0 * h);
            }
            prop_assert!(div.abs() < 1e-6);
        }
    }
}
