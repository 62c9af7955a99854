//! Value types shared across the pipeline.
//!
//! Every constructor validates its invariants; once built, values are
//! immutable (apart from the explicit training / accumulation entry points in
//! [`crate::stdp`] and [`crate::evidence`]).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense activation vector produced by one sensor contact.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyFeatures);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl<'de> Deserialize<'de> for FeatureVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        FeatureVector::new(values).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        FeatureVector::new(values)
    }
}

/// A rank-order spike packet: neuron id to spike offset (seconds) within the
/// packet, plus the global arrival time of the packet.
///
/// Spikes iterate in ascending neuron id so every downstream sum is
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikePacket {
    spikes: BTreeMap<usize, f64>,
    arrival: f64,
}

impl SpikePacket {
    /// Silent packet, as produced when no neuron crosses threshold.
    pub fn empty(arrival: f64) -> Self {
        Self {
            spikes: BTreeMap::new(),
            arrival,
        }
    }

    /// Builds a packet from explicit offsets, checking that the earliest
    /// offset is exactly zero, that all offsets lie in `[0, span)` and that
    /// they are pairwise distinct.
    pub fn new(spikes: BTreeMap<usize, f64>, arrival: f64, span: f64) -> Result<Self> {
        if !arrival.is_finite() {
            return Err(Error::Packet(format!("non-finite arrival {arrival}")));
        }
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::Packet(format!("span must be positive, got {span}")));
        }
        let mut seen: Vec<f64> = Vec::with_capacity(spikes.len());
        for (&id, &t) in &spikes {
            if !(t.is_finite() && (0.0..span).contains(&t)) {
                return Err(Error::Packet(format!(
                    "spike time {t} of neuron {id} outside [0, {span})"
                )));
            }
            seen.push(t);
        }
        seen.sort_by(f64::total_cmp);
        if let Some(&first) = seen.first() {
            if first != 0.0 {
                return Err(Error::Packet(format!(
                    "earliest spike at {first}, expected 0"
                )));
            }
        }
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Packet("spike times are not distinct".into()));
        }
        Ok(Self { spikes, arrival })
    }

    /// Internal constructor for the encoder, which upholds the invariants
    /// by construction.
    pub(crate) fn from_parts(spikes: BTreeMap<usize, f64>, arrival: f64) -> Self {
        Self { spikes, arrival }
    }

    pub fn with_arrival(mut self, arrival: f64) -> Self {
        self.arrival = arrival;
        self
    }

    pub fn arrival(&self) -> f64 {
        self.arrival
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn get(&self, neuron: usize) -> Option<f64> {
        self.spikes.get(&neuron).copied()
    }

    /// `(neuron, offset)` in ascending neuron id.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.spikes.iter().map(|(&k, &v)| (k, v))
    }

    /// `(neuron, offset)` in firing order.
    pub fn firing_order(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        v
    }

    /// Firing rank of each active neuron (0 = first), in ascending neuron id.
    pub fn ranks(&self) -> BTreeMap<usize, usize> {
        self.firing_order()
            .into_iter()
            .enumerate()
            .map(|(rank, (id, _))| (id, rank))
            .collect()
    }

    /// The first neuron to fire, if any.
    pub fn leading(&self) -> Option<usize> {
        self.firing_order().first().map(|&(id, _)| id)
    }

    /// Global spike time of `neuron`: arrival plus offset.
    pub fn global_time(&self, neuron: usize) -> Option<f64> {
        self.get(neuron).map(|t| self.arrival + t)
    }

    pub fn max_neuron(&self) -> Option<usize> {
        self.spikes.keys().next_back().copied()
    }
}

/// N×N synaptic weights, `w[i][j]` being the strength of the connection
/// from pre-synaptic neuron `i` to post-synaptic neuron `j`. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightMatrixJson {
    n: usize,
    w: Vec<Vec<f64>>,
}

impl WeightMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            w: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::param("n", "weight matrix needs at least one neuron"));
        }
        let mut w = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: row.len(),
                });
            }
            if let Some((j, &value)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite {
                    index: i * n + j,
                    value,
                });
            }
            w.extend(row);
        }
        Ok(Self { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, pre: usize, post: usize) -> f64 {
        self.w[pre * self.n + post]
    }

    pub fn set(&mut self, pre: usize, post: usize, value: f64) {
        self.w[pre * self.n + post] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.w.chunks(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = WeightMatrixJson {
            n: self.n,
            w: self.rows().map(<[f64]>::to_vec).collect(),
        };
        serde_json::to_string(&doc).expect("finite weights always serialize")
    }

    /// Parses `{ "n": N, "w": [[...], ...] }`.
    pub fn from_json(input: &str) -> Result<Self> {
        let doc: WeightMatrixJson = serde_json::from_str(input)?;
        if doc.w.len() != doc.n {
            return Err(Error::Dimension {
                expected: doc.n,
                actual: doc.w.len(),
            });
        }
        Self::from_rows(doc.w)
    }
}

/// Exponential-window STDP amplitudes and time constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StdpParams {
    pub a_plus: f64,
    pub a_minus: f64,
    /// seconds
    pub tau_plus: f64,
    /// seconds
    pub tau_minus: f64,
    /// Optional symmetric bound `[-clip, clip]` on trained weights.
    pub clip: Option<f64>,
}

impl Default for StdpParams {
    fn default() -> Self {
        Self {
            a_plus: 0.01,
            a_minus: 0.01,
            tau_plus: 0.020,
            tau_minus: 0.020,
            clip: None,
        }
    }
}

impl StdpParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("tau_plus", self.tau_plus),
            ("tau_minus", self.tau_minus),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        if let Some(c) = self.clip {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::param(
                    "clip",
                    format!("must be positive and finite, got {c}"),
                ));
            }
        }
        Ok(())
    }
}

/// One timed sensor contact. `position` is the simulated sensor location in
/// world units, kept for ground-truth comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct Contact {
    pub features: FeatureVector,
    pub time: f64,
    pub position: [f64; 3],
}

/// Ordered sequence of timed contacts over one object.
#[derive(Debug, Clone, PartialEq)]
pub struct Traversal {
    contacts: Vec<Contact>,
    motor_direction: f64,
    label: String,
}

impl Traversal {
    /// `min_gap` is the packet span of the encoder in use; consecutive
    /// contacts must be separated by strictly more than that.
    pub fn new(
        contacts: Vec<Contact>,
        motor_direction: f64,
        label: impl Into<String>,
        min_gap: f64,
    ) -> Result<Self> {
        if !motor_direction.is_finite() {
            return Err(Error::Traversal("non-finite motor direction".into()));
        }
        if let Some(first) = contacts.first() {
            let dim = first.features.dim();
            for c in &contacts {
                if c.features.dim() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        actual: c.features.dim(),
                    });
                }
                if !c.time.is_finite() {
                    return Err(Error::Traversal("non-finite contact time".into()));
                }
            }
        }
        for (k, pair) in contacts.windows(2).enumerate() {
            let gap = pair[1].time - pair[0].time;
            if gap <= 0.0 {
                return Err(Error::Traversal(format!(
                    "contact times not strictly increasing at contact {}",
                    k + 1
                )));
            }
            if gap <= min_gap {
                return Err(Error::Traversal(format!(
                    "gap {gap} s before contact {} does not exceed packet span {min_gap} s",
                    k + 1
                )));
            }
        }
        Ok(Self {
            contacts,
            motor_direction,
            label: label.into(),
        })
    }

    pub fn contacts(&self) -> &[Contact] {
        &self.contacts
    }

    pub fn motor_direction(&self) -> f64 {
        self.motor_direction
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.contacts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contacts.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.contacts.first().map(|c| c.features.dim())
    }

    /// Same contacts (with their times and positions) in a different order
    /// of features. Used to check order blindness of the dense baseline.
    pub fn permuted_features(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.contacts.len() {
            return Err(Error::Dimension {
                expected: self.contacts.len(),
                actual: order.len(),
            });
        }
        let contacts = self
            .contacts
            .iter()
            .zip(order)
            .map(|(c, &k)| Contact {
                features: self.contacts[k].features.clone(),
                time: c.time,
                position: c.position,
            })
            .collect();
        Ok(Self {
            contacts,
            motor_direction: self.motor_direction,
            label: self.label.clone(),
        })
    }
}

/// Per-class evidence with per-class memory coefficients λ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceState {
    pub(crate) evidence: Vec<f64>,
    pub(crate) lambdas: Vec<f64>,
    pub(crate) alpha: f64,
}

impl EvidenceState {
    /// Uniform evidence, every λ set to `initial_lambda`.
    pub fn new(n_classes: usize, initial_lambda: f64, alpha: f64) -> Result<Self> {
        if n_classes == 0 {
            return Err(Error::param("n_classes", "need at least one class"));
        }
        if !(0.0..=1.0).contains(&initial_lambda) {
            return Err(Error::param(
                "initial_lambda",
                format!("must lie in [0, 1], got {initial_lambda}"),
            ));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param(
                "alpha",
                format!("must be positive, got {alpha}"),
            ));
        }
        Ok(Self {
            evidence: vec![1.0 / n_classes as f64; n_classes],
            lambdas: vec![initial_lambda; n_classes],
            alpha,
        })
    }

    /// Explicit state, e.g. to resume a run.
    pub fn from_parts(evidence: Vec<f64>, lambdas: Vec<f64>, alpha: f64) -> Result<Self> {
        if evidence.is_empty() || evidence.len() != lambdas.len() {
            return Err(Error::Dimension {
                expected: evidence.len().max(1),
                actual: lambdas.len(),
            });
        }
        if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::param("lambdas", "every λ must lie in [0, 1]"));
        }
        if evidence.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::param(
                "evidence",
                "entries must be finite and non-negative",
            ));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param(
                "alpha",
                format!("must be positive, got {alpha}"),
            ));
        }
        Ok(Self {
            evidence,
            lambdas,
            alpha,
        })
    }

    pub fn evidence(&self) -> &[f64] {
        &self.evidence
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_classes(&self) -> usize {
        self.evidence.len()
    }
}

/// Planar displacement estimate in world units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Displacement {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Displacement {
    pub fn norm(&self) -> f64 {
        (self.dx * self.dx + self.dy * self.dy + self.dz * self.dz).sqrt()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.dx, self.dy, self.dz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyParams {
    assumed_velocity: f64,
}

impl LatencyParams {
    pub fn new(assumed_velocity: f64) -> Result<Self> {
        if !(assumed_velocity > 0.0 && assumed_velocity.is_finite()) {
            return Err(Error::param(
                "assumed_velocity",
                format!("must be positive and finite, got {assumed_velocity}"),
            ));
        }
        Ok(Self { assumed_velocity })
    }

    pub fn assumed_velocity(&self) -> f64 {
        self.assumed_velocity
    }
}

impl Default for LatencyParams {
    fn default() -> Self {
        Self {
            assumed_velocity: 1.0,
        }
    }
}
