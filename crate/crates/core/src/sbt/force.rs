//! Prescribed line force densities f(s) on [-1, 1].

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Result, SbtError};

type Vec3 = Vector3<f64>;
pub type VecFn = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

#[derive(Clone)]
pub enum ForceKind {
    Constant(Vec3),
    /// (1 − s²) d
    ParabolicDecay(Vec3),
    Custom {
        f: VecFn,
        f_prime: VecFn,
    },
}

#[derive(Clone)]
pub struct ForceDensity {
    kind: ForceKind,
    scale: f64,
}

impl fmt::Debug for ForceDensity {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ForceKind::Constant(d) => write!(fm, "constant {:?} x {}", d.as_slice(), self.scale),
            ForceKind::ParabolicDecay(d) => write!(fm, "parabolic {:?} x {}", d.as_slice(), self.scale),
            ForceKind::Custom { .. } => write!(fm, "custom x {}", self.scale),
        }
    }
}

impl ForceDensity {
    pub fn constant(direction: Vec3) -> Self {
        ForceDensity { kind: ForceKind::Constant(direction), scale: 1.0 }
    }

    pub fn parabolic(direction: Vec3) -> Self {
        ForceDensity { kind: ForceKind::ParabolicDecay(direction), scale: 1.0 }
    }

    pub fn custom(f: VecFn, f_prime: VecFn) -> Self {
        ForceDensity { kind: ForceKind::Custom { f, f_prime }, scale: 1.0 }
    }

    pub fn zero() -> Self {
        Self::constant(Vec3::zeros())
    }

    /// Parses `constant:fx,fy,fz` or `parabolic:fx,fy,fz`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| SbtError::input(format!("force spec '{text}' must look like kind:fx,fy,fz")))?;
        let comps: Vec<f64> = rest
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| SbtError::input(format!("force components in '{text}': {e}")))?;
        if comps.len() != 3 || comps.iter().any(|c| !c.is_finite()) {
            return Err(SbtError::input(format!("force spec '{text}' needs three finite components")));
        }
        let d = Vec3::new(comps[0], comps[1], comps[2]);
        match kind.trim() {
            "constant" => Ok(Self::constant(d)),
            "parabolic" | "parabolic-decay" => Ok(Self::parabolic(d)),
            other => Err(SbtError::input(format!("unknown force kind '{other}'"))),
        }
    }

    /// λ f.
    pub fn scaled(&self, lambda: f64) -> Self {
        ForceDensity { kind: self.kind.clone(), scale: self.scale * lambda }
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            ForceKind::Constant(_) => "constant",
            ForceKind::ParabolicDecay(_) => "parabolic-decay",
            ForceKind::Custom { .. } => "custom",
        }
    }

    pub fn value(&self, s: f64) -> Vec3 {
        let v = match &self.kind {
            ForceKind::Constant(d) => *d,
            ForceKind::ParabolicDecay(d) => d * (1.0 - s * s),
            ForceKind::Custom { f, .. } => f(s),
        };
        v * self.scale
    }

    pub fn derivative(&self, s: f64) -> Vec3 {
        let v = match &self.kind {
            ForceKind::Constant(_) => Vec3::zeros(),
            ForceKind::ParabolicDecay(d) => d * (-2.0 * s),
            ForceKind::Custom { f_prime, .. } => f_prime(s),
        };
        v * self.scale
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            ForceKind::Constant(d) | ForceKind::ParabolicDecay(d) => self.scale == 0.0 || d.norm() == 0.0,
            ForceKind::Custom { .. } => self.scale == 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let f = ForceDensity::parse("parabolic:1,0,0").unwrap();
        assert_eq!(f.value(0.5), Vec3::new(0.75, 0.0, 0.0));
        assert_eq!(f.derivative(0.5), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(f.value(1.0), Vec3::zeros());
        let g = ForceDensity::parse("constant: 0, 0, 2").unwrap().scaled(0.5);
        assert_eq!(g.value(-0.3), Vec3::z());
        assert!(ForceDensity::parse("wavy:1,2,3").is_err());
        assert!(ForceDensity::parse("constant:1,2").is_err());
        assert!(ForceDensity::zero().is_zero());
    }
}
