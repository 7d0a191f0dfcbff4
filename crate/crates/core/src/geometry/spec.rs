//! JSON description of a slender body.

use serde::{Deserialize, Serialize};

use super::body::{default_seed, SlenderBody};
use super::centerline::{Centerline, Vec3};
use super::frame::FrameField;
use super::radius::RadiusProfile;
use super::stretch::StretchMap;
use crate::error::{Result, SbtError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CenterlineSpec {
    Straight { direction: [f64; 3] },
    CircularArc { radius: f64 },
    Helix { radius: f64, pitch: f64 },
    Spline { nodes: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSpec {
    pub kind: String,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StretchSpec {
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_normal: Option<[f64; 3]>,
}

fn default_step() -> f64 {
    1e-3
}

impl Default for FrameSpec {
    fn default() -> Self {
        FrameSpec { step: default_step(), seed_normal: None }
    }
}

fn default_stretch() -> StretchSpec {
    StretchSpec::Uniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub centerline: CenterlineSpec,
    pub radius: RadiusSpec,
    #[serde(default = "default_stretch")]
    pub stretch: StretchSpec,
    #[serde(default)]
    pub frame: FrameSpec,
}

impl GeometrySpec {
    pub fn straight_prolate(epsilon: f64) -> Self {
        GeometrySpec {
            centerline: CenterlineSpec::Straight { direction: [0.0, 0.0, 1.0] },
            radius: RadiusSpec { kind: "prolate".into(), epsilon },
            stretch: StretchSpec::Uniform,
            frame: FrameSpec { step: 1e-3, seed_normal: Some([1.0, 0.0, 0.0]) },
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut g = self.clone();
        g.radius.epsilon = epsilon;
        g
    }

    pub fn centerline(&self) -> Result<Centerline> {
        match &self.centerline {
            CenterlineSpec::Straight { direction } => Centerline::straight(Vec3::from(*direction)),
            CenterlineSpec::CircularArc { radius } => Centerline::circular_arc(*radius),
            CenterlineSpec::Helix { radius, pitch } => Centerline::helix(*radius, *pitch),
            CenterlineSpec::Spline { nodes } => {
                let pts: Vec<Vec3> = nodes.iter().map(|p| Vec3::from(*p)).collect();
                Centerline::spline(&pts)
            }
        }
    }

    pub fn radius_profile(&self) -> Result<RadiusProfile> {
        RadiusProfile::preset(&self.radius.kind, self.radius.epsilon)
    }

    pub fn build(&self) -> Result<SlenderBody> {
        if !self.radius.epsilon.is_finite() {
            return Err(SbtError::input("epsilon must be finite"));
        }
        let centerline = self.centerline()?;
        let seed = match self.frame.seed_normal {
            Some(s) => Vec3::from(s),
            None => default_seed(&centerline),
        };
        let frame = FrameField::build(&centerline, self.frame.step, seed)?;
        let radius = self.radius_profile()?;
        let stretch = self.build_stretch(&radius)?;
        SlenderBody::new(centerline, frame, radius, stretch)
    }

    pub fn build_stretch(&self, radius: &RadiusProfile) -> Result<StretchMap> {
        match self.stretch {
            StretchSpec::Uniform => StretchMap::uniform(radius.eta),
        }
    }
}
