//! JSON run configuration.
//!
//! Every section and field is optional and falls back to the defaults of the
//! owning module. Unknown keys are hard errors so typos never silently fall
//! back to a default.

use serde::{Deserialize, Serialize};

use crate::encoding::EncoderParams;
use crate::error::{Error, Result};
use crate::inference::ScoringParams;
use crate::types::StdpParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccumulatorConfig {
    pub initial_lambda: f64,
    pub alpha: f64,
}

impl Default for AccumulatorConfig {
    fn default() -> Self {
        Self {
            initial_lambda: 0.5,
            alpha: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub inter_contact_interval: f64,
    pub velocity: f64,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            inter_contact_interval: 0.020,
            velocity: 1.0,
            seed: 42,
        }
    }
}

/// Base prediction error per object type for the λ experiment, plus the λ
/// learning rate used there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorSchedule {
    pub alpha: f64,
    pub uniform: f64,
    pub moderate: f64,
    pub complex: f64,
    /// Std of the Gaussian jitter added to the base error each step.
    pub noise_std: f64,
    /// Number of trailing steps averaged into the converged λ.
    pub final_window: usize,
}

impl Default for ErrorSchedule {
    fn default() -> Self {
        // Calibrated by grid search against the reference λ values
        // 0.30 / 0.60 / 0.87 (see `experiments::calibrate_schedule`).
        Self {
            alpha: 0.01,
            uniform: 0.57375,
            moderate: 0.46275,
            complex: 0.3645,
            noise_std: 0.05,
            final_window: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_train: usize,
    pub n_test: usize,
    /// Noise level of the single discrimination run.
    pub sigma: f64,
    /// Noise levels of the sweep.
    pub sigmas: Vec<f64>,
    /// λ-experiment length.
    pub steps: usize,
    pub error_schedule: ErrorSchedule,
    /// Run trials on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_train: 50,
            n_test: 200,
            sigma: 0.05,
            sigmas: vec![0.00, 0.05, 0.10, 0.20, 0.35, 0.50],
            steps: 300,
            error_schedule: ErrorSchedule::default(),
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub encoder: EncoderParams,
    pub stdp: StdpParams,
    pub scoring: ScoringParams,
    pub accumulator: AccumulatorConfig,
    pub world: WorldConfig,
    pub experiment: ExperimentConfig,
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be positive and finite, got {v}")))
    }
}

fn unit(key: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(bad(key, format!("must lie in [0, 1], got {v}")))
    }
}

impl Config {
    /// Parses and validates a JSON config document.
    pub fn from_json(input: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(input);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            bad(&key, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        positive("encoder.tau_base", self.encoder.tau_base)?;
        if !self.encoder.threshold.is_finite() {
            return Err(bad("encoder.threshold", "must be finite"));
        }
        positive("stdp.a_plus", self.stdp.a_plus)?;
        positive("stdp.a_minus", self.stdp.a_minus)?;
        positive("stdp.tau_plus", self.stdp.tau_plus)?;
        positive("stdp.tau_minus", self.stdp.tau_minus)?;
        if let Some(c) = self.stdp.clip {
            positive("stdp.clip", c)?;
        }
        positive("scoring.temperature", self.scoring.temperature)?;
        unit("scoring.rank_decay", self.scoring.rank_decay)?;
        unit(
            "accumulator.initial_lambda",
            self.accumulator.initial_lambda,
        )?;
        positive("accumulator.alpha", self.accumulator.alpha)?;
        positive(
            "world.inter_contact_interval",
            self.world.inter_contact_interval,
        )?;
        if self.world.inter_contact_interval <= self.encoder.tau_base {
            return Err(bad(
                "world.inter_contact_interval",
                format!(
                    "must exceed encoder.tau_base ({} s) so packets never overlap",
                    self.encoder.tau_base
                ),
            ));
        }
        positive("world.velocity", self.world.velocity)?;
        let ex = &self.experiment;
        if ex.n_train == 0 {
            return Err(bad("experiment.n_train", "must be at least 1"));
        }
        if ex.n_test == 0 {
            return Err(bad("experiment.n_test", "must be at least 1"));
        }
        if !(ex.sigma >= 0.0 && ex.sigma.is_finite()) {
            return Err(bad("experiment.sigma", "must be finite and non-negative"));
        }
        if ex.sigmas.is_empty() {
            return Err(bad(
                "experiment.sigmas",
                "must list at least one noise level",
            ));
        }
        if let Some(s) = ex.sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(bad("experiment.sigmas", format!("invalid noise level {s}")));
        }
        if ex.steps == 0 {
            return Err(bad("experiment.steps", "must be at least 1"));
        }
        let es = &ex.error_schedule;
        positive("experiment.error_schedule.alpha", es.alpha)?;
        unit("experiment.error_schedule.uniform", es.uniform)?;
        unit("experiment.error_schedule.moderate", es.moderate)?;
        unit("experiment.error_schedule.complex", es.complex)?;
        if !(es.noise_std >= 0.0 && es.noise_std.is_finite()) {
            return Err(bad(
                "experiment.error_schedule.noise_std",
                "must be finite and non-negative",
            ));
        }
        if es.final_window == 0 || es.final_window > ex.steps {
            return Err(bad(
                "experiment.error_schedule.final_window",
                format!("must lie in [1, steps = {}]", ex.steps),
            ));
        }
        Ok(())
    }
}
