use fracmass::geom::{Region, SurfaceSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SEED_VAR: &str = "FRACMASS_SEED";

/// Experiment configuration. Every key is optional; command-line flags win over the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub s_grid: Option<Vec<f64>>,
    pub surface: Option<SurfaceSpec>,
    pub domain: Option<Region>,
    pub samples: Option<usize>,
    pub h: Option<f64>,
    pub r_cut: Option<f64>,
    pub truncation: Option<f64>,
    pub tolerance: Option<f64>,
    pub degrees: Option<Vec<i32>>,
    pub delta: Option<f64>,
    pub base_lo: Option<Vec<f64>>,
    pub base_hi: Option<Vec<f64>>,
    pub dims: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub configurations: Option<usize>,
    pub loops: Option<usize>,
    pub step: Option<f64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub delta_pin: Option<f64>,
    pub eps: Option<Vec<f64>>,
    pub instances: Option<usize>,
    pub beta: Option<f64>,
    pub c0: Option<f64>,
}

#[derive(Debug)]
pub enum ConfigError {
    Read(String),
    Schema(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Schema(m) => write!(f, "invalid config: {m}"),
        }
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(ExperimentConfig::default());
    }
    serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl ExperimentConfig {
    /// Keys set in `other` replace ours.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        overlay!(
            self, other, command, seed, threads, out_dir, s_grid, surface, domain, samples, h, r_cut, truncation,
            tolerance, degrees, delta, base_lo, base_hi, dims, alpha, configurations, loops, step, max_iter, tol,
            delta_pin, eps, instances, beta, c0
        );
    }

    /// Seed from the file, then the environment, then flags (applied later by `overlay`).
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var(SEED_VAR) {
            let seed = v
                .trim()
                .parse()
                .map_err(|_| ConfigError::Schema(format!("{SEED_VAR}: expected an unsigned integer, got {v:?}")))?;
            self.seed = Some(seed);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(g) = &self.s_grid {
            if g.is_empty() {
                return Err(ConfigError::Schema("s_grid: must not be empty".into()));
            }
            if g.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
                return Err(ConfigError::Schema("s_grid: values must lie in (0,1)".into()));
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::Schema("s_grid: must be strictly increasing".into()));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(ConfigError::Schema("alpha: must lie in (0,1)".into()));
            }
        }
        for (key, v) in [("h", self.h), ("r_cut", self.r_cut), ("truncation", self.truncation), ("delta", self.delta)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ConfigError::Schema(format!("{key}: must be positive")));
                }
            }
        }
        if let Some(e) = &self.eps {
            if e.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                return Err(ConfigError::Schema("eps: values must lie in (0,1)".into()));
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(ConfigError::Schema("beta: must lie in (0,1)".into()));
            }
        }
        if let Some(c) = self.c0 {
            if !(c > 0.0 && c.is_finite()) {
                return Err(ConfigError::Schema("c0: must be positive".into()));
            }
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(ConfigError::Schema("threads: must be at least 1".into()));
            }
        }
        if let Some(spec) = &self.surface {
            spec.validate().map_err(|e| ConfigError::Schema(format!("surface: {e}")))?;
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("results"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let err = parse(r#"{"command": "crofton", "sampels": 10}"#).unwrap_err();
        assert!(err.to_string().contains("sampels"), "{err}");
    }

    #[test]
    fn flags_win() {
        let mut file = parse(r#"{"seed": 3, "samples": 10}"#).unwrap();
        let flags = ExperimentConfig { seed: Some(9), ..Default::default() };
        file.overlay(&flags);
        assert_eq!(file.seed, Some(9));
        assert_eq!(file.samples, Some(10));
    }

    #[test]
    fn s_grid_must_increase() {
        let c = parse(r#"{"s_grid": [0.5, 0.5]}"#).unwrap();
        assert!(c.validate().is_err());
        let c = parse(r#"{"s_grid": [0.5, 1.0]}"#).unwrap();
        assert!(c.validate().is_err());
        let c = parse(r#"{"s_grid": [0.2, 0.5]}"#).unwrap();
        assert!(c.validate().is_ok());
    }
}
