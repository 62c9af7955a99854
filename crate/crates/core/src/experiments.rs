//! Traversal discrimination, noise sweep and λ convergence experiments.
//!
//! Dense and temporal classifiers always see the same noisy traversals: each
//! traversal is generated once from its own RNG sub-stream and handed to
//! both. Trials may run on the rayon pool; training reductions always run in
//! a fixed order, so serial and parallel runs give identical reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::{dense_classify, dense_train};
use crate::config::{Config, ErrorSchedule};
use crate::encoding::{encode_at, EncoderParams};
use crate::error::{Error, Result};
use crate::inference::{traversal_score, ObjectModel, ScoringParams};
use crate::rng::SplitMix64;
use crate::stdp::train_in_place;
use crate::types::{EvidenceState, SpikePacket, StdpParams, Traversal, WeightMatrix};
use crate::world::{
    complex_object, generate_traversal, moderate_object, object_a, object_b, uniform_object,
    SyntheticObject, WorldParams,
};

const TAG_DISCRIMINATION: u64 = 0xD15C;
const TAG_LAMBDA: u64 = 0x1A3B;
const PHASE_TRAIN: u64 = 0;
const PHASE_TEST: u64 = 1;

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationConfig {
    pub encoder: EncoderParams,
    pub stdp: StdpParams,
    pub scoring: ScoringParams,
    pub world: WorldParams,
    pub n_train: usize,
    pub n_test: usize,
    pub objects: Vec<SyntheticObject>,
    pub parallel: bool,
    /// Distinguishes the RNG streams of runs sharing one seed.
    pub run: u64,
}

impl DiscriminationConfig {
    /// Objects A and B at `experiment.sigma`.
    pub fn from_config(cfg: &Config) -> Self {
        Self {
            encoder: cfg.encoder,
            stdp: cfg.stdp,
            scoring: cfg.scoring,
            world: WorldParams {
                noise_sigma: cfg.experiment.sigma,
                inter_contact_interval: cfg.world.inter_contact_interval,
                velocity: cfg.world.velocity,
                seed: cfg.world.seed,
            },
            n_train: cfg.experiment.n_train,
            n_test: cfg.experiment.n_test,
            objects: vec![object_a(), object_b()],
            parallel: cfg.experiment.parallel,
            run: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.stdp.validate()?;
        self.scoring.validate()?;
        self.world.validate(self.encoder.tau_base)?;
        if self.n_train == 0 {
            return Err(Error::param(
                "n_train",
                "untrained models score every traversal 0",
            ));
        }
        if self.n_test == 0 {
            return Err(Error::param("n_test", "must be at least 1"));
        }
        if self.objects.len() < 2 {
            return Err(Error::param(
                "objects",
                "discrimination needs at least two objects",
            ));
        }
        let dim = self.objects[0].dim();
        for o in &self.objects {
            o.validate()?;
            if o.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    actual: o.dim(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Accuracy {
    pub label: String,
    pub n: usize,
    pub dense_correct: usize,
    pub temporal_correct: usize,
    pub dense_acc: f64,
    pub temporal_acc: f64,
    pub dense_ci: (f64, f64),
    pub temporal_ci: (f64, f64),
}

impl Accuracy {
    fn new(label: String, n: usize, dense_correct: usize, temporal_correct: usize) -> Self {
        Self {
            label,
            n,
            dense_correct,
            temporal_correct,
            dense_acc: dense_correct as f64 / n as f64,
            temporal_acc: temporal_correct as f64 / n as f64,
            dense_ci: wilson_interval(dense_correct, n, Z95),
            temporal_ci: wilson_interval(temporal_correct, n, Z95),
        }
    }

    /// Temporal minus dense accuracy, in percentage points.
    pub fn gap_pp(&self) -> f64 {
        100.0 * (self.temporal_acc - self.dense_acc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub sigma: f64,
    pub per_object: Vec<Accuracy>,
    pub overall: Accuracy,
    #[serde(skip)]
    pub models: Vec<ObjectModel>,
}

fn encode_traversal(t: &Traversal, encoder: &EncoderParams) -> Vec<SpikePacket> {
    t.contacts()
        .iter()
        .map(|c| encode_at(&c.features, encoder, c.time))
        .collect()
}

fn map_maybe_parallel<T: Send, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn argmax_low(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

pub fn run_discrimination(cfg: &DiscriminationConfig) -> Result<DiscriminationReport> {
    cfg.validate()?;
    let n_obj = cfg.objects.len();
    let dim = cfg.objects[0].dim();
    let gen = |phase: u64, per_obj: usize| -> Result<Vec<Vec<Traversal>>> {
        let flat = map_maybe_parallel(n_obj * per_obj, cfg.parallel, |idx| {
            let (o, trial) = (idx / per_obj, idx % per_obj);
            let key = [TAG_DISCRIMINATION, cfg.run, phase, o as u64, trial as u64];
            generate_traversal(&cfg.objects[o], &cfg.world, &key, cfg.encoder.tau_base)
        });
        let mut flat = flat.into_iter();
        (0..n_obj)
            .map(|_| flat.by_ref().take(per_obj).collect::<Result<Vec<_>>>())
            .collect()
    };
    let train = gen(PHASE_TRAIN, cfg.n_train)?;
    let test = gen(PHASE_TEST, cfg.n_test)?;

    // temporal: one STDP matrix per object, trained in trial order
    let mut models = Vec::with_capacity(n_obj);
    for (obj, trials) in cfg.objects.iter().zip(&train) {
        let mut w = WeightMatrix::zeros(dim);
        for t in trials {
            train_in_place(&mut w, &encode_traversal(t, &cfg.encoder), &cfg.stdp)?;
        }
        models.push(ObjectModel::new(obj.label.clone(), w));
    }

    let by_class: Vec<(String, Vec<&Traversal>)> = cfg
        .objects
        .iter()
        .zip(&train)
        .map(|(o, ts)| (o.label.clone(), ts.iter().collect()))
        .collect();
    let centroids = dense_train(&by_class)?;

    let flat_test: Vec<(usize, &Traversal)> = test
        .iter()
        .enumerate()
        .flat_map(|(o, ts)| ts.iter().map(move |t| (o, t)))
        .collect();
    let verdicts = map_maybe_parallel(flat_test.len(), cfg.parallel, |k| -> Result<(bool, bool)> {
        let (truth, t) = flat_test[k];
        let packets = encode_traversal(t, &cfg.encoder);
        let scores = models
            .iter()
            .map(|m| traversal_score(&packets, &m.weights, cfg.scoring.rank_decay))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            dense_classify(t, &centroids) == truth,
            argmax_low(&scores) == truth,
        ))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut per_object = Vec::with_capacity(n_obj);
    for (o, obj) in cfg.objects.iter().enumerate() {
        let slice = &verdicts[o * cfg.n_test..(o + 1) * cfg.n_test];
        let dense = slice.iter().filter(|v| v.0).count();
        let temporal = slice.iter().filter(|v| v.1).count();
        per_object.push(Accuracy::new(
            obj.label.clone(),
            cfg.n_test,
            dense,
            temporal,
        ));
    }
    let overall = Accuracy::new(
        "Overall".into(),
        verdicts.len(),
        per_object.iter().map(|a| a.dense_correct).sum(),
        per_object.iter().map(|a| a.temporal_correct).sum(),
    );
    Ok(DiscriminationReport {
        sigma: cfg.world.noise_sigma,
        per_object,
        overall,
        models,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSweepReport {
    pub rows: Vec<DiscriminationReport>,
}

/// One discrimination run per noise level, each on its own RNG streams.
pub fn run_noise_sweep(base: &DiscriminationConfig, sigmas: &[f64]) -> Result<NoiseSweepReport> {
    if sigmas.is_empty() {
        return Err(Error::param("sigmas", "need at least one noise level"));
    }
    let rows = sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mut cfg = base.clone();
            cfg.world.noise_sigma = sigma;
            cfg.run = base.run + 1 + i as u64;
            run_discrimination(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseSweepReport { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaConfig {
    pub objects: Vec<(SyntheticObject, f64)>,
    pub schedule: ErrorSchedule,
    pub initial_lambda: f64,
    pub steps: usize,
    pub seed: u64,
}

impl LambdaConfig {
    /// Uniform, Moderate and Complex with their scheduled base errors.
    pub fn from_config(cfg: &Config) -> Self {
        let s = &cfg.experiment.error_schedule;
        Self {
            objects: vec![
                (uniform_object(), s.uniform),
                (moderate_object(), s.moderate),
                (complex_object(), s.complex),
            ],
            schedule: s.clone(),
            initial_lambda: cfg.accumulator.initial_lambda,
            steps: cfg.experiment.steps,
            seed: cfg.world.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRow {
    pub label: String,
    pub contacts: String,
    pub base_error: f64,
    pub final_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaReport {
    pub rows: Vec<LambdaRow>,
    /// `trajectories[c][s]` is λ of object `c` after step `s`.
    pub trajectories: Vec<Vec<f64>>,
}

/// Short S/C/E description of an object's canonical contacts, by leading
/// feature. Objects with other dimensions get their leading neuron ids.
pub fn contact_pattern(obj: &SyntheticObject) -> String {
    obj.contacts
        .iter()
        .map(|c| {
            let v = c.as_slice();
            let lead = argmax_low(v);
            match (v.len(), lead) {
                (3, 0) => "S".to_string(),
                (3, 1) => "C".to_string(),
                (3, 2) => "E".to_string(),
                _ => lead.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join("-")
}

/// Drives one λ per object through `adapt_lambda` with per-step error
/// `clamp(base + jitter, 0, 1)` and reports the mean over the final window.
pub fn run_lambda_convergence(cfg: &LambdaConfig) -> Result<LambdaReport> {
    let s = &cfg.schedule;
    if cfg.objects.is_empty() {
        return Err(Error::param("objects", "need at least one object type"));
    }
    if cfg.steps == 0 || s.final_window == 0 || s.final_window > cfg.steps {
        return Err(Error::param("final_window", "must lie in [1, steps]"));
    }
    let mut state = EvidenceState::new(cfg.objects.len(), cfg.initial_lambda, s.alpha)?;
    let mut trajectories = vec![Vec::with_capacity(cfg.steps); cfg.objects.len()];
    for (c, (_, base)) in cfg.objects.iter().enumerate() {
        let mut rng = SplitMix64::stream(cfg.seed, &[TAG_LAMBDA, c as u64]);
        for _ in 0..cfg.steps {
            let jitter = if s.noise_std > 0.0 {
                s.noise_std * rng.next_gaussian()
            } else {
                0.0
            };
            state.adapt_lambda(c, (base + jitter).clamp(0.0, 1.0))?;
            trajectories[c].push(state.lambdas()[c]);
        }
    }
    let rows = cfg
        .objects
        .iter()
        .zip(&trajectories)
        .map(|((obj, base), traj)| {
            let tail = &traj[traj.len() - s.final_window..];
            LambdaRow {
                label: obj.label.clone(),
                contacts: contact_pattern(obj),
                base_error: *base,
                final_mean: tail.iter().sum::<f64>() / tail.len() as f64,
            }
        })
        .collect();
    Ok(LambdaReport { rows, trajectories })
}

/// Brute-force search for per-object base errors reproducing `targets`
/// (final-window λ means), holding α, jitter and run length fixed. Each base
/// error is searched independently on `grid`; returns the best base error
/// per target together with its absolute miss.
pub fn calibrate_schedule(
    template: &LambdaConfig,
    targets: &[f64],
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if targets.len() != template.objects.len() {
        return Err(Error::Dimension {
            expected: template.objects.len(),
            actual: targets.len(),
        });
    }
    let mut out = Vec::with_capacity(targets.len());
    for (c, &target) in targets.iter().enumerate() {
        let mut best = (f64::NAN, f64::INFINITY);
        for &e in grid {
            let mut cfg = template.clone();
            for (k, (_, base)) in cfg.objects.iter_mut().enumerate() {
                *base = if k == c { e } else { 0.5 };
            }
            let report = run_lambda_convergence(&cfg)?;
            let miss = (report.rows[c].final_mean - target).abs();
            if miss < best.1 {
                best = (e, miss);
            }
        }
        out.push(best);
    }
    Ok(out)
}
