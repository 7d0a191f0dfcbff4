//! Quadrature settings for line and θ integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::quadrature::{Panels, MAX_GAUSS_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Panels per unit length away from the near point.
    #[serde(default = "d_base")]
    pub base_panels: usize,
    /// Dyadic levels toward the near point; automatic when absent.
    #[serde(default)]
    pub refinement_levels: Option<usize>,
    #[serde(default = "d_nodes")]
    pub nodes_per_panel: usize,
    #[serde(default = "d_theta")]
    pub theta_nodes: usize,
}

fn d_base() -> usize {
    8
}
fn d_nodes() -> usize {
    16
}
fn d_theta() -> usize {
    64
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { base_panels: d_base(), refinement_levels: None, nodes_per_panel: d_nodes(), theta_nodes: d_theta() }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_panels == 0 || self.nodes_per_panel == 0 || self.theta_nodes == 0 {
            return Err(SbtError::input("quadrature counts must be at least 1"));
        }
        if self.nodes_per_panel > MAX_GAUSS_NODES {
            return Err(SbtError::input(format!("nodes_per_panel must be at most {MAX_GAUSS_NODES}")));
        }
        if self.refinement_levels.is_some_and(|l| l > 60) {
            return Err(SbtError::input("refinement_levels must be at most 60"));
        }
        Ok(())
    }

    pub fn window(&self) -> f64 {
        1.0 / self.base_panels as f64
    }

    /// ⌈log₂(W/d)⌉ + 2 levels, so the innermost panel is about d/4 wide.
    pub fn levels_for(&self, distance: f64) -> usize {
        if let Some(l) = self.refinement_levels {
            return l;
        }
        let ratio = self.window() / distance.max(1e-300);
        let l = if ratio > 1.0 { ratio.log2().ceil() as usize } else { 0 };
        (l + 2).min(60)
    }

    /// Panels on [-1, 1] graded toward `center`.
    pub fn panels(&self, center: f64, levels: usize) -> Panels {
        let w = self.window();
        Panels::graded(-1.0, 1.0, center, w, levels, w)
    }

    /// Same spec with twice the Gauss nodes per panel (capped).
    pub fn refined(&self) -> Self {
        QuadratureSpec { nodes_per_panel: (2 * self.nodes_per_panel).min(MAX_GAUSS_NODES), ..*self }
    }

    pub fn thetas(&self) -> Vec<f64> {
        let n = self.theta_nodes;
        (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect()
    }
}
