//! Strict JSON configuration documents and their provenance hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SbtError};
use crate::geometry::GeometrySpec;
use crate::residuals::ForceConvention;
use crate::sbt::{ForceDensity, LForm, QuadratureSpec};

/// Parses a JSON document, rejecting unknown keys where the target type
/// asks for it. Syntax errors carry line and column.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| SbtError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| SbtError::input(format!("{}: {e}", path.display())))
}

/// SHA-256 of the compact JSON encoding, hex.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config values serialize");
    hex::encode(Sha256::digest(&bytes))
}

fn default_window() -> f64 {
    1.0
}

/// A fully resolved invocation. Every output file carries the hash of the
/// RunConfig that produced it, so a run can be repeated exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub force: Option<String>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub outputs: Vec<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub l_form: LForm,
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default)]
    pub force_convention: ForceConvention,
    /// Subcommand-specific settings (lemma id, fit model, ...).
    #[serde(default)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.into(),
            geometry: None,
            force: None,
            quadrature: QuadratureSpec::default(),
            epsilon: None,
            epsilons: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            threads: None,
            l_form: LForm::default(),
            window: default_window(),
            force_convention: ForceConvention::default(),
            extra: serde_json::Map::new(),
        }
    }

    /// Checks everything that can be checked before running: ε range and
    /// the r_max/4 guard, force syntax, quadrature, input files present.
    pub fn validate(&self) -> Result<()> {
        let mut eps: Vec<f64> = self.epsilons.clone().unwrap_or_default();
        eps.extend(self.epsilon);
        for &e in &eps {
            if !(e > 0.0 && e <= 0.25) {
                return Err(SbtError::input(format!("epsilon = {e} outside (0, 0.25]")));
            }
        }
        if let Some(g) = &self.geometry {
            let mut list = eps.clone();
            if list.is_empty() {
                list.push(g.radius.epsilon);
            }
            for e in list {
                g.with_epsilon(e).build()?;
            }
        }
        if let Some(f) = &self.force {
            ForceDensity::parse(f)?;
        }
        self.quadrature.validate()?;
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(SbtError::input(format!("window = {} outside (0, 1]", self.window)));
        }
        if self.threads == Some(0) {
            return Err(SbtError::input("threads must be positive"));
        }
        for p in &self.inputs {
            if !p.exists() {
                return Err(SbtError::input(format!("input file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let c: RunConfig = load_json(path)?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_json;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new("residuals");
        c.geometry = Some(GeometrySpec::straight_prolate(0.05));
        c.force = Some("parabolic:1,0,0".into());
        c.epsilon = Some(0.05);
        c.extra.insert("note".into(), serde_json::json!("x"));
        let p = dir.path().join("run.json");
        write_json(&c, &p).unwrap();
        let back = load_config(&p).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn rejections() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new("residuals");
        c.geometry = Some(GeometrySpec::straight_prolate(0.05));
        c.epsilon = Some(0.3);
        assert!(matches!(c.validate(), Err(SbtError::Input(_))));

        let p = dir.path().join("bad.json");
        fs::write(&p, "{\"command\": \"eval\", \"wat\": 1}").unwrap();
        let e = load_config(&p).unwrap_err().to_string();
        assert!(e.contains("wat"), "{e}");

        fs::write(&p, "{\"command\": \n  \"eval\",,}").unwrap();
        let e = load_config(&p).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");

        let missing = load_config(&dir.path().join("missing.json")).unwrap_err();
        assert_eq!(missing.exit_code(), 1);
    }

    #[test]
    fn hash_is_sensitive() {
        let a = RunConfig::new("eval");
        let mut b = a.clone();
        b.window = 0.9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
