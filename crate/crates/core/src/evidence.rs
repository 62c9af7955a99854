//! Leaky evidence accumulation with a learnable per-class memory λ.
//!
//! `E(t+1) = (1 - λ) · likelihood(obs_t) + λ · E(t)`, renormalised to the
//! simplex whenever the total is positive.

use crate::error::{Error, Result};
use crate::types::EvidenceState;

impl EvidenceState {
    pub fn update(&mut self, log_likelihoods: &[f64]) -> Result<()> {
        if log_likelihoods.len() != self.evidence.len() {
            return Err(Error::Dimension {
                expected: self.evidence.len(),
                actual: log_likelihoods.len(),
            });
        }
        if log_likelihoods
            .iter()
            .any(|l| l.is_nan() || *l == f64::INFINITY)
        {
            return Err(Error::param("log_likelihoods", "must be finite or -inf"));
        }
        for ((e, &ll), &lambda) in self
            .evidence
            .iter_mut()
            .zip(log_likelihoods)
            .zip(&self.lambdas)
        {
            *e = (1.0 - lambda) * ll.exp() + lambda * *e;
        }
        let total: f64 = self.evidence.iter().sum();
        if total > 0.0 {
            self.evidence.iter_mut().for_each(|e| *e /= total);
        }
        Ok(())
    }

    /// Heuristic λ step: `λ += α · (0.5 - error)`, clipped to `[0, 1]`.
    /// Errors below 0.5 lengthen memory, errors above 0.5 shorten it.
    pub fn adapt_lambda(&mut self, class_idx: usize, prediction_error: f64) -> Result<()> {
        let classes = self.lambdas.len();
        let lambda = self
            .lambdas
            .get_mut(class_idx)
            .ok_or(Error::ClassOutOfRange {
                index: class_idx,
                classes,
            })?;
        if !(0.0..=1.0).contains(&prediction_error) {
            return Err(Error::param(
                "prediction_error",
                format!("must lie in [0, 1], got {prediction_error}"),
            ));
        }
        *lambda = (*lambda + self.alpha * (0.5 - prediction_error)).clamp(0.0, 1.0);
        Ok(())
    }

    /// Argmax of the evidence; ties go to the lowest class index.
    pub fn best_hypothesis(&self) -> usize {
        let mut best = 0;
        for (c, &e) in self.evidence.iter().enumerate().skip(1) {
            if e > self.evidence[best] {
                best = c;
            }
        }
        best
    }
}

/// `1 - exp(log_lik[best])`, clamped into `[0, 1]`.
pub fn prediction_error(log_likelihoods: &[f64], best: usize) -> f64 {
    (1.0 - log_likelihoods[best].exp()).clamp(0.0, 1.0)
}
