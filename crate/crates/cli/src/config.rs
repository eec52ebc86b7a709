//! Experiment configuration (JSON).

use std::path::PathBuf;

use levy_rinv_core::{JumpLaw, LevyModel};
use serde::{Deserialize, Serialize};

use crate::experiments::ExperimentName;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// A catalog model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Brownian { mu: f64, sigma2: f64 },
    PureDrift { b: f64 },
    /// `X_t = b t + compound Poisson`.
    BoundedVariation { b: f64, rate: f64, law: JumpLaw },
    /// Gaussian part and compound Poisson jumps with `E X_1 = mu`.
    JumpDiffusion { mu: f64, sigma2: f64, rate: f64, law: JumpLaw },
    /// Raw triplet.
    Triplet(LevyModel),
}

impl ModelSpec {
    pub fn build(&self) -> Result<LevyModel, ConfigError> {
        let m = match self {
            ModelSpec::Brownian { mu, sigma2 } => LevyModel::brownian(*mu, *sigma2),
            ModelSpec::PureDrift { b } => LevyModel::pure_drift(*b),
            ModelSpec::BoundedVariation { b, rate, law } => LevyModel::bounded_variation(*b, *rate, law.clone()),
            ModelSpec::JumpDiffusion { mu, sigma2, rate, law } => {
                LevyModel::jump_diffusion(*mu, *sigma2, *rate, law.clone())
            }
            ModelSpec::Triplet(m) => LevyModel::new(m.a, m.sigma2, m.jumps.clone()),
        };
        m.map_err(|e| ConfigError::Invalid(format!("model: {e}")))
    }

    /// Same model with another Gaussian coefficient.
    pub fn with_sigma2(&self, s2: f64) -> Option<ModelSpec> {
        match self {
            ModelSpec::Brownian { mu, .. } => Some(ModelSpec::Brownian { mu: *mu, sigma2: s2 }),
            ModelSpec::JumpDiffusion { mu, rate, law, .. } => Some(ModelSpec::JumpDiffusion {
                mu: *mu,
                sigma2: s2,
                rate: *rate,
                law: law.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub horizon: f64,
    #[serde(default)]
    pub bridge_correction: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            dt: 1e-3,
            horizon: 16.0,
            bridge_correction: false,
        }
    }
}

/// Experiment-specific settings; each experiment reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Level up to which right inverses are built.
    pub x_max: f64,
    /// Relative tolerance of deterministic-route comparisons.
    pub rel_tol: f64,
    /// Cap on excursion durations in two-sample tests.
    pub cap: f64,
    /// Excursions shorter than this are ignored in rate comparisons.
    pub t_min: f64,
    /// Half-width of the band defining local time at zero.
    pub eps: f64,
    /// Gaussian coefficient of the second run of the paired comparison.
    pub sigma2_pair: f64,
    /// Number of excursions to collect, where applicable.
    pub n_target: usize,
    /// Local time at which the thinned construction is sampled.
    pub local_time: f64,
    /// Ages at which entrance laws are compared.
    pub ages: Vec<f64>,
    /// Length of the final stretch of each path in which no new
    /// excursion is counted.
    pub tail_window: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            x_max: 1.0,
            rel_tol: 0.02,
            cap: 4.0,
            t_min: 0.05,
            eps: 0.02,
            sigma2_pair: 4.0,
            n_target: 10_000,
            local_time: 1.0,
            ages: vec![0.05, 0.2, 0.5],
            tail_window: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    pub model: ModelSpec,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub seed: u64,
    pub n_paths: usize,
    #[serde(default = "default_q_grid")]
    pub q_grid: Vec<f64>,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    /// Dyadic depth (Evans) or thinning level.
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Extra depth of the Evans hitting chain.
    #[serde(default = "default_refinement")]
    pub refinement: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
}

fn default_q_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_lambda_grid() -> Vec<f64> {
    vec![0.0, 1.0]
}

fn default_depth() -> u32 {
    8
}

fn default_refinement() -> u32 {
    4
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        self.model.build()?;
        if !(self.sim.dt > 0.0) || !(self.sim.horizon > self.sim.dt) {
            return bad("sim: need 0 < dt < horizon");
        }
        if self.n_paths == 0 {
            return bad("n_paths must be positive");
        }
        if self.q_grid.is_empty() || self.q_grid.iter().any(|q| !(*q > 0.0)) {
            return bad("q_grid must be non-empty with positive entries");
        }
        if self.lambda_grid.is_empty() {
            return bad("lambda_grid must be non-empty");
        }
        if self.depth + self.refinement > levy_rinv_core::inverse::MAX_DEPTH {
            return bad("depth + refinement too large");
        }
        if !(self.params.x_max > 0.0) {
            return bad("params.x_max must be positive");
        }
        if self.params.ages.is_empty() {
            return bad("params.ages must be non-empty");
        }
        if !(self.params.tail_window >= 0.0) || self.params.tail_window >= self.sim.horizon {
            return bad("params.tail_window must lie in [0, horizon)");
        }
        Ok(())
    }

    pub fn model(&self) -> LevyModel {
        self.model.build().expect("validated")
    }

    /// Time before which excursions are counted.
    pub fn t_cut(&self) -> f64 {
        self.sim.horizon - self.params.tail_window
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "rho-routes", "model": {"family": "brownian", "mu": 0, "sigma2": 1}, "n_paths": 10}"#,
        )
        .unwrap();
        assert_eq!(cfg.q_grid, vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.model(), LevyModel::brownian(0.0, 1.0).unwrap());
    }

    #[test]
    fn parses_jump_laws() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "theorem1", "n_paths": 5,
                "model": {"family": "jump_diffusion", "mu": 0, "sigma2": 1, "rate": 1,
                          "law": {"law": "two_sided_exponential", "p_up": 0.5, "rate_up": 2, "rate_down": 2}}}"#,
        )
        .unwrap();
        assert!(cfg.model().has_positive_jumps());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"experiment": "nope", "model": {"family": "pure_drift", "b": 1}, "n_paths": 1}"#,
            r#"{"experiment": "rho-routes", "model": {"family": "pure_drift", "b": 1}, "n_paths": 0}"#,
            r#"{"experiment": "rho-routes", "model": {"family": "brownian", "mu": 0, "sigma2": -1}, "n_paths": 1}"#,
            r#"{"experiment": "rho-routes", "model": {"family": "pure_drift", "b": 1}, "n_paths": 1, "extra": 1}"#,
        ] {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }
}
