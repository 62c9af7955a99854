//! One exploration step at a time: encode the contact, infer displacement
//! from packet timing, optionally learn, score every object model, and fold
//! the scores into the evidence accumulator.

use serde::{Deserialize, Serialize};

use crate::encoding::{encode_at, EncoderParams};
use crate::error::{Error, Result};
use crate::evidence::prediction_error;
use crate::latency::{decode_displacement, inter_packet_interval};
use crate::stdp::apply_pair;
use crate::types::{
    EvidenceState, FeatureVector, LatencyParams, SpikePacket, StdpParams, WeightMatrix,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectModel {
    pub label: String,
    pub weights: WeightMatrix,
}

impl ObjectModel {
    pub fn new(label: impl Into<String>, weights: WeightMatrix) -> Self {
        Self {
            label: label.into(),
            weights,
        }
    }

    pub fn untrained(label: impl Into<String>, n: usize) -> Self {
        Self::new(label, WeightMatrix::zeros(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringParams {
    /// Softmax temperature turning alignment scores into log-likelihoods.
    pub temperature: f64,
    /// Rank desensitisation `m`: the pair `(i, j)` contributes
    /// `w[i][j] · m^rank(i) · m^rank(j)`. `1.0` sums every causal pair
    /// equally; `0.0` keeps only the leading-spike pathway.
    pub rank_decay: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            temperature: 1.0,
            rank_decay: 0.0,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::param("temperature", "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&self.rank_decay) {
            return Err(Error::param("rank_decay", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

fn check_range(packet: &SpikePacket, n: usize) -> Result<()> {
    match packet.max_neuron() {
        Some(id) if id >= n => Err(Error::NeuronOutOfRange { id, n }),
        _ => Ok(()),
    }
}

/// Causal alignment between two consecutive packets under one weight
/// matrix: the rank-weighted sum of `w[i][j]` over pre neurons `i` of `prev`
/// and post neurons `j` of `cur` with `i` firing strictly before `j`.
pub fn alignment_score(
    prev: &SpikePacket,
    cur: &SpikePacket,
    weights: &WeightMatrix,
    rank_decay: f64,
) -> Result<f64> {
    check_range(prev, weights.n())?;
    check_range(cur, weights.n())?;
    let prev_ranks = prev.ranks();
    let cur_ranks = cur.ranks();
    let mut total = 0.0;
    for (i, ti) in prev.iter() {
        let gain_i = rank_decay.powi(prev_ranks[&i] as i32);
        if gain_i == 0.0 {
            continue;
        }
        let pre = prev.arrival() + ti;
        for (j, tj) in cur.iter() {
            if pre < cur.arrival() + tj {
                total += weights.get(i, j) * gain_i * rank_decay.powi(cur_ranks[&j] as i32);
            }
        }
    }
    Ok(total)
}

/// Sum of [`alignment_score`] over consecutive packet pairs.
pub fn traversal_score(
    packets: &[SpikePacket],
    weights: &WeightMatrix,
    rank_decay: f64,
) -> Result<f64> {
    packets
        .windows(2)
        .map(|p| alignment_score(&p[0], &p[1], weights, rank_decay))
        .sum()
}

/// Numerically stable `log softmax(scores / temperature)`.
pub fn log_softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let scaled: Vec<f64> = scores.iter().map(|s| s / temperature).collect();
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        let u = -(scores.len() as f64).ln();
        return vec![u; scores.len()];
    }
    let lse = max + scaled.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    scaled.iter().map(|x| x - lse).collect()
}

/// Per-model log-likelihoods of `cur` following `prev`.
pub fn log_likelihoods(
    prev: &SpikePacket,
    cur: &SpikePacket,
    models: &[ObjectModel],
    scoring: &ScoringParams,
) -> Result<Vec<f64>> {
    if models.is_empty() {
        return Err(Error::param("models", "need at least one object model"));
    }
    let scores = models
        .iter()
        .map(|m| alignment_score(prev, cur, &m.weights, scoring.rank_decay))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_softmax(&scores, scoring.temperature))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motor {
    /// world units per second
    pub velocity: f64,
    /// radians
    pub direction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Encode,
    Interval,
    Displacement,
    Plasticity,
    Score,
    Accumulate,
    AdaptLambda,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub step: u64,
    pub dt: Option<f64>,
    pub displacement: Option<[f64; 3]>,
    pub scores: Vec<f64>,
    pub best: usize,
    pub prediction_error: f64,
    /// Order in which the stages ran during this step.
    #[serde(skip)]
    pub stages: Vec<Stage>,
    /// Whether step 4 changed the learning matrix.
    #[serde(skip)]
    pub learned: bool,
}

impl StepDiagnostics {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostics serialize")
    }
}

/// State of one exploring agent.
#[derive(Debug, Clone)]
pub struct InferenceLoop {
    pub encoder: EncoderParams,
    pub stdp: StdpParams,
    pub scoring: ScoringParams,
    models: Vec<ObjectModel>,
    evidence: EvidenceState,
    prev: Option<SpikePacket>,
    learning: Option<usize>,
    step: u64,
}

impl InferenceLoop {
    pub fn new(
        models: Vec<ObjectModel>,
        encoder: EncoderParams,
        stdp: StdpParams,
        scoring: ScoringParams,
        initial_lambda: f64,
        alpha: f64,
    ) -> Result<Self> {
        encoder.validate()?;
        stdp.validate()?;
        scoring.validate()?;
        let n = models
            .first()
            .ok_or_else(|| Error::param("models", "need at least one object model"))?
            .weights
            .n();
        if let Some(m) = models.iter().find(|m| m.weights.n() != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: m.weights.n(),
            });
        }
        let evidence = EvidenceState::new(models.len(), initial_lambda, alpha)?;
        Ok(Self {
            encoder,
            stdp,
            scoring,
            models,
            evidence,
            prev: None,
            learning: None,
            step: 0,
        })
    }

    /// Makes step 4 train model `idx` online; `None` freezes every model.
    pub fn set_learning(&mut self, idx: Option<usize>) -> Result<()> {
        if let Some(i) = idx {
            if i >= self.models.len() {
                return Err(Error::ClassOutOfRange {
                    index: i,
                    classes: self.models.len(),
                });
            }
        }
        self.learning = idx;
        Ok(())
    }

    pub fn models(&self) -> &[ObjectModel] {
        &self.models
    }

    pub fn evidence(&self) -> &EvidenceState {
        &self.evidence
    }

    pub fn best_hypothesis(&self) -> usize {
        self.evidence.best_hypothesis()
    }

    /// Forgets the previous packet and resets evidence to uniform, keeping
    /// learned λ values and weights.
    pub fn reset_episode(&mut self) {
        let n = self.evidence.evidence.len();
        self.evidence.evidence = vec![1.0 / n as f64; n];
        self.prev = None;
        self.step = 0;
    }

    /// Runs one exploration step for a contact sensed at global time `time`.
    pub fn exploration_step(
        &mut self,
        reading: &FeatureVector,
        time: f64,
        motor: Motor,
    ) -> Result<(usize, StepDiagnostics)> {
        let n = self.models[0].weights.n();
        if reading.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: reading.dim(),
            });
        }
        let mut stages = Vec::with_capacity(7);

        let packet = encode_at(reading, &self.encoder, time);
        stages.push(Stage::Encode);

        let dt = self
            .prev
            .as_ref()
            .and_then(|prev| inter_packet_interval(prev, &packet));
        stages.push(Stage::Interval);

        let displacement = match dt {
            Some(dt) => {
                let latency = LatencyParams::new(motor.velocity)?;
                Some(decode_displacement(dt, motor.direction, &latency)?.to_array())
            }
            None => None,
        };
        stages.push(Stage::Displacement);

        let mut learned = false;
        if let (Some(k), Some(prev), Some(_)) = (self.learning, &self.prev, dt) {
            apply_pair(&mut self.models[k].weights, prev, &packet, &self.stdp);
            learned = true;
            stages.push(Stage::Plasticity);
        }

        let silent = SpikePacket::empty(time);
        let prev = self.prev.as_ref().unwrap_or(&silent);
        let scores = self
            .models
            .iter()
            .map(|m| alignment_score(prev, &packet, &m.weights, self.scoring.rank_decay))
            .collect::<Result<Vec<_>>>()?;
        let log_lik = log_softmax(&scores, self.scoring.temperature);
        stages.push(Stage::Score);

        self.evidence.update(&log_lik)?;
        stages.push(Stage::Accumulate);

        let best = self.evidence.best_hypothesis();
        let err = prediction_error(&log_lik, best);
        self.evidence.adapt_lambda(best, err)?;
        stages.push(Stage::AdaptLambda);

        let diag = StepDiagnostics {
            step: self.step,
            dt,
            displacement,
            scores,
            best,
            prediction_error: err,
            stages,
            learned,
        };
        self.prev = Some(packet);
        self.step += 1;
        Ok((best, diag))
    }
}
