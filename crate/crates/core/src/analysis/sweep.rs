//! ε-sweeps of the residual diagnostics.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};
use crate::geometry::GeometrySpec;
use crate::quadrature::chebyshev_roots;
use crate::residuals::{residual_sample, ResidualOptions, ResidualSample};
use crate::sbt::{ForceDensity, QuadratureSpec};

fn default_epsilons() -> Vec<f64> {
    vec![0.1, 0.05, 0.025, 0.0125]
}
fn default_s_points() -> usize {
    101
}
fn default_window() -> f64 {
    1.0
}
fn default_force() -> String {
    "parabolic:1,0,0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    pub geometry: GeometrySpec,
    /// `constant:fx,fy,fz` or `parabolic:fx,fy,fz`
    #[serde(default = "default_force")]
    pub force: String,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    /// Chebyshev points of the first kind in s.
    #[serde(default = "default_s_points")]
    pub s_points: usize,
    /// Sup-norms are taken over |s| ≤ window.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default)]
    pub options: ResidualOptions,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(geometry: GeometrySpec, force: &str) -> Self {
        SweepConfig {
            epsilons: default_epsilons(),
            geometry,
            force: force.into(),
            quadrature: QuadratureSpec::default(),
            s_points: default_s_points(),
            window: default_window(),
            options: ResidualOptions::default(),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(SbtError::input("epsilons must not be empty"));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(SbtError::input("epsilons must be strictly decreasing"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && **e <= 0.25)) {
            return Err(SbtError::input(format!("epsilon = {e} outside (0, 0.25]")));
        }
        if self.s_points < 2 {
            return Err(SbtError::input("s_points must be at least 2"));
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(SbtError::input(format!("window = {} outside (0, 1]", self.window)));
        }
        if self.threads == Some(0) {
            return Err(SbtError::input("threads must be positive"));
        }
        self.quadrature.validate()?;
        ForceDensity::parse(&self.force)?;
        Ok(())
    }

    pub fn s_grid(&self) -> Vec<f64> {
        chebyshev_roots(self.s_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub theta_residual_max: f64,
    pub force_residual_max: f64,
    pub centerline_gap_max: f64,
    pub force_split_max: f64,
    pub f_rho_residual_max: f64,
    pub f_t_max: f64,
    /// s values whose quadrature failed the refinement self-check.
    pub quad_warnings: Vec<f64>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRun {
    pub summary: EpsilonSummary,
    pub samples: Vec<ResidualSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub window: f64,
    pub threads: usize,
    pub runs: Vec<EpsilonRun>,
}

impl SweepReport {
    pub fn quad_warning_count(&self) -> usize {
        self.runs.iter().map(|r| r.summary.quad_warnings.len()).sum()
    }

    /// (ε, max) pairs of one summary column.
    pub fn column(&self, pick: impl Fn(&EpsilonSummary) -> f64) -> Vec<(f64, f64)> {
        self.runs.iter().map(|r| (r.summary.epsilon, pick(&r.summary))).collect()
    }
}

fn summarize(epsilon: f64, samples: &[ResidualSample], window: f64, runtime_ms: f64) -> EpsilonSummary {
    let inside = || samples.iter().filter(|x| x.s.abs() <= window);
    let max = |f: &dyn Fn(&ResidualSample) -> f64| inside().map(f).fold(0.0, f64::max);
    EpsilonSummary {
        epsilon,
        theta_residual_max: max(&|x| x.theta_residual_sup),
        force_residual_max: max(&|x| x.force_residual.norm()),
        centerline_gap_max: max(&|x| x.centerline_gap),
        force_split_max: max(&|x| x.force_split_gap),
        f_rho_residual_max: max(&|x| x.f_rho_residual),
        f_t_max: max(&|x| x.f_t_norm),
        quad_warnings: samples.iter().filter(|x| x.quad_warn).map(|x| x.s).collect(),
        runtime_ms,
    }
}

/// Runs every (ε, s) task on a pool of `threads` workers. Each task is pure
/// and results are gathered in grid order, so the output does not depend on
/// the thread count.
pub fn epsilon_sweep(config: &SweepConfig, threads: usize) -> Result<SweepReport> {
    config.validate()?;
    let force = ForceDensity::parse(&config.force)?;
    let grid = config.s_grid();
    let bodies = config.epsilons.iter().map(|&e| config.geometry.with_epsilon(e).build()).collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().map_err(|e| SbtError::numerical(format!("thread pool: {e}")))?;
    let mut runs = Vec::with_capacity(bodies.len());
    for (body, &eps) in bodies.iter().zip(&config.epsilons) {
        let start = Instant::now();
        let samples: Vec<ResidualSample> =
            pool.install(|| grid.par_iter().map(|&s| residual_sample(body, &force, s, &config.quadrature, &config.options)).collect::<Result<Vec<_>>>())?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        runs.push(EpsilonRun { summary: summarize(eps, &samples, config.window, ms), samples });
    }
    Ok(SweepReport { window: config.window, threads: threads.max(1), runs })
}
