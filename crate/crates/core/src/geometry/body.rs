//! The assembled slender body Σ_ε: surface parameterization, Jacobian, normal.

use super::centerline::{Centerline, Mat3, Vec3};
use super::frame::{Frame, FrameField};
use super::radius::RadiusProfile;
use super::stretch::StretchMap;
use crate::error::{Result, SbtError};

#[derive(Debug, Clone)]
pub struct SlenderBody {
    pub centerline: Centerline,
    pub frame: FrameField,
    pub radius: RadiusProfile,
    pub stretch: StretchMap,
    pub epsilon: f64,
    pub r_max: f64,
}

/// r_max = min(c_Γ/2, 1/(2κ_max)).
pub fn r_max(c_gamma: f64, kappa_max: f64) -> f64 {
    let curv = if kappa_max > 0.0 { 0.5 / kappa_max } else { f64::INFINITY };
    (0.5 * c_gamma).min(curv)
}

impl SlenderBody {
    pub fn new(centerline: Centerline, frame: FrameField, radius: RadiusProfile, stretch: StretchMap) -> Result<Self> {
        let epsilon = radius.epsilon;
        let rm = r_max(centerline.c_gamma(), centerline.kappa_max());
        if epsilon > 0.25 * rm {
            return Err(SbtError::geometry(format!(
                "epsilon = {epsilon} exceeds r_max/4 = {:.6} (c_gamma = {:.4}, kappa_max = {:.4})",
                0.25 * rm,
                centerline.c_gamma(),
                centerline.kappa_max()
            )));
        }
        let eta = radius.eta;
        if (stretch.phi(1.0) - eta).abs() > 1e-12 || (stretch.phi(-1.0) + eta).abs() > 1e-12 {
            return Err(SbtError::input("stretch map must send [-1, 1] onto [-eta, eta]"));
        }
        Ok(SlenderBody { centerline, frame, radius, stretch, epsilon, r_max: rm })
    }

    /// Convenience: straight or curved body with prolate radius and uniform
    /// stretch, frame step 1e-3 and a seed normal built from the left tangent.
    pub fn prolate(centerline: Centerline, epsilon: f64) -> Result<Self> {
        let seed = default_seed(&centerline);
        let frame = FrameField::build(&centerline, 1e-3, seed)?;
        let radius = RadiusProfile::prolate(epsilon)?;
        let stretch = StretchMap::uniform(radius.eta)?;
        Self::new(centerline, frame, radius, stretch)
    }

    pub fn eta(&self) -> f64 {
        self.radius.eta
    }

    pub fn frame_at(&self, phi: f64) -> Frame {
        self.frame.at(phi)
    }

    fn check_phi(&self, phi: f64) -> Result<()> {
        if !(phi.abs() < self.eta()) {
            return Err(SbtError::domain(format!("|phi| = {} must be below eta = {}", phi.abs(), self.eta())));
        }
        Ok(())
    }

    /// Γ_ε(φ, θ) = X(φ) + ε a(φ) e_ρ(φ, θ).
    pub fn surface_point(&self, phi: f64, theta: f64) -> Result<Vec3> {
        self.check_phi(phi)?;
        Ok(self.surface_point_unchecked(phi, theta))
    }

    pub(crate) fn surface_point_unchecked(&self, phi: f64, theta: f64) -> Vec3 {
        let f = self.frame.at(phi);
        self.centerline.position(phi) + f.e_rho(theta) * (self.epsilon * self.radius.a(phi))
    }

    /// J_ε = ε a √((1 − ε a κ̂)² + ε² a′²).
    pub fn surface_jacobian(&self, phi: f64, theta: f64) -> Result<f64> {
        self.check_phi(phi)?;
        let f = self.frame.at(phi);
        Ok(self.jacobian_with(&f, phi, theta))
    }

    pub(crate) fn jacobian_with(&self, f: &Frame, phi: f64, theta: f64) -> f64 {
        let ea = self.epsilon * self.radius.a(phi);
        let eap = self.epsilon * self.radius.a_prime(phi);
        ea * ((1.0 - ea * f.kappa_hat(theta)).powi(2) + eap * eap).sqrt()
    }

    /// Inward unit normal n = (−e_ρ + ε a′ e_t)/√(1 + ε² a′²).
    pub fn surface_normal(&self, phi: f64, theta: f64) -> Result<Vec3> {
        self.check_phi(phi)?;
        let f = self.frame.at(phi);
        Ok(self.normal_with(&f, phi, theta))
    }

    pub(crate) fn normal_with(&self, f: &Frame, phi: f64, theta: f64) -> Vec3 {
        let eap = self.epsilon * self.radius.a_prime(phi);
        (f.t * eap - f.e_rho(theta)) / (1.0 + eap * eap).sqrt()
    }

    /// Tube coordinates (φ, ρ) of the nearest centerline point on [-3/2, 3/2].
    pub fn tube_coordinates(&self, x: &Vec3) -> (f64, f64) {
        self.centerline.closest_parameter(x, -1.5, 1.5)
    }

    /// True when x lies strictly inside Σ_ε; surface points are outside.
    pub fn contains(&self, x: &Vec3) -> bool {
        let (phi, rho) = self.tube_coordinates(x);
        if rho >= self.r_max {
            return false;
        }
        phi.abs() < self.eta() && rho < self.epsilon * self.radius.a(phi) * (1.0 - 1e-12)
    }

    /// Rigidly rotated copy; the frame is rebuilt from the rotated seed.
    pub fn rotated(&self, q: &Mat3) -> Result<Self> {
        let centerline = self.centerline.rotated(q);
        let seed = q * self.frame.samples()[0].n1;
        let frame = FrameField::build(&centerline, self.frame.step(), seed)?;
        Self::new(centerline, frame, self.radius.clone(), self.stretch.clone())
    }
}

/// A unit normal at φ = −3/2: the coordinate axis least aligned with the
/// tangent, projected.
pub fn default_seed(c: &Centerline) -> Vec3 {
    let t = c.tangent(-1.5);
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let e = axes.iter().min_by(|a, b| a.dot(&t).abs().total_cmp(&b.dot(&t).abs())).unwrap();
    let n = e - t * e.dot(&t);
    n / n.norm()
}
