//! Least-squares scaling fits err ≈ C ε^p or err ≈ C ε^p |log ε|^q.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbtError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum FitModel {
    Pow,
    /// fixed log exponent q ∈ {1, 3/2}
    LogCorrected {
        q: f64,
    },
}

impl FitModel {
    /// `pow`, `log` (q = 1), `log:1` or `log:1.5`.
    pub fn parse(text: &str) -> Result<Self> {
        let model = match text.trim() {
            "pow" => FitModel::Pow,
            "log" | "log:1" => FitModel::LogCorrected { q: 1.0 },
            "log:1.5" | "log:3/2" => FitModel::LogCorrected { q: 1.5 },
            other => return Err(SbtError::input(format!("unknown fit model '{other}' (pow, log, log:1.5)"))),
        };
        Ok(model)
    }

    pub fn tag(&self) -> String {
        match self {
            FitModel::Pow => "pow".into(),
            FitModel::LogCorrected { q } => format!("log:{q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub p: f64,
    pub c: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_scaling(pairs: &[(f64, f64)], model: FitModel) -> Result<ScalingFit> {
    if pairs.len() < 3 {
        return Err(SbtError::input(format!("scaling fit needs at least 3 points, got {}", pairs.len())));
    }
    let q = match model {
        FitModel::Pow => 0.0,
        FitModel::LogCorrected { q } if q == 1.0 || q == 1.5 => q,
        FitModel::LogCorrected { q } => return Err(SbtError::input(format!("log exponent q = {q} must be 1 or 1.5"))),
    };
    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for &(eps, err) in pairs {
        if !(err > 0.0) || !err.is_finite() {
            return Err(SbtError::input(format!("error values must be positive and finite, got {err} at epsilon {eps}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(SbtError::input(format!("epsilon {eps} must lie in (0, 1)")));
        }
        xs.push(eps.ln());
        ys.push(err.ln() - q * eps.ln().abs().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SbtError::input("scaling fit needs at least two distinct epsilon values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let p = sxy / sxx;
    let b = my - p * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - b - p * x).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(ScalingFit { model, p, c: b.exp(), r_squared, points: pairs.len() })
}
