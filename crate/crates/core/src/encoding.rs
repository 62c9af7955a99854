//! Rank-order spike encoding and rank-order code capacity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::types::{FeatureVector, SpikePacket};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderParams {
    /// Packet span in seconds. The last-ranked neuron fires strictly before it.
    pub tau_base: f64,
    /// Neurons must be strictly above this activation to fire.
    pub threshold: f64,
}

impl Default for EncoderParams {
    fn default() -> Self {
        Self {
            tau_base: 0.010,
            threshold: 0.1,
        }
    }
}

impl EncoderParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_base > 0.0 && self.tau_base.is_finite()) {
            return Err(Error::param(
                "tau_base",
                format!("must be positive and finite, got {}", self.tau_base),
            ));
        }
        if !self.threshold.is_finite() {
            return Err(Error::param("threshold", "must be finite"));
        }
        Ok(())
    }
}

/// Encodes a contact into a packet arriving at time 0.
///
/// The `n` supra-threshold neurons are ranked by descending activation (equal
/// activations keep ascending neuron id order) and the neuron of rank `r`
/// fires at `tau_base * r / n`.
pub fn encode(features: &FeatureVector, params: &EncoderParams) -> SpikePacket {
    encode_at(features, params, 0.0)
}

pub fn encode_at(features: &FeatureVector, params: &EncoderParams, arrival: f64) -> SpikePacket {
    let values = features.as_slice();
    let mut active: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > params.threshold)
        .collect();
    if active.is_empty() {
        return SpikePacket::empty(arrival);
    }
    // stable: ties stay in ascending id order
    active.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let n = active.len() as f64;
    let spikes: BTreeMap<usize, f64> = active
        .into_iter()
        .enumerate()
        .map(|(rank, id)| (id, params.tau_base * (rank as f64 / n)))
        .collect();
    SpikePacket::from_parts(spikes, arrival)
}

/// Encodes raw activations, rejecting non-finite input.
pub fn encode_values(values: &[f64], params: &EncoderParams) -> Result<SpikePacket> {
    let features = FeatureVector::new(values.to_vec())?;
    Ok(encode(&features, params))
}

/// Parses a comma-separated activation list such as `0.2,0.9,0.1,0.7`.
pub fn parse_features(input: &str) -> Result<FeatureVector> {
    let values = input
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{tok}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureVector::new(values)
}

/// Renders a packet as a JSON object keyed by neuron id, in firing order,
/// with times in seconds rounded to the microsecond.
pub fn packet_to_json(packet: &SpikePacket) -> String {
    let body: Vec<String> = packet
        .firing_order()
        .into_iter()
        .map(|(id, t)| {
            let rounded = (t * 1e6).round() / 1e6;
            format!(
                "\"{id}\":{}",
                serde_json::Number::from_f64(rounded).expect("finite")
            )
        })
        .collect();
    format!("{{{}}}", body.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// Every firing order of the active neurons is a distinct code word.
    Ordered,
    /// Only which `n_active` of `n_total` neurons fired is informative.
    Unordered { n_total: u64 },
}

/// Bits per volley: `log2(n!)` for ordered codes, `log2(C(n_total, n))` for
/// unordered codes. Small factorials are exact; larger ones go through
/// log-gamma so big populations do not overflow.
pub fn code_capacity_bits(n_active: u64, mode: CapacityMode) -> Result<f64> {
    if n_active == 0 {
        return Err(Error::param("n_active", "must be at least 1"));
    }
    let ln_fact = |m: u64| {
        if m <= 20 {
            // exact in u64 up to 20!
            ((1..=m).product::<u64>() as f64).ln()
        } else {
            ln_gamma(m as f64 + 1.0)
        }
    };
    let nats = match mode {
        CapacityMode::Ordered => ln_fact(n_active),
        CapacityMode::Unordered { n_total } => {
            if n_active > n_total {
                return Err(Error::param(
                    "n_active",
                    format!("{n_active} active exceeds population {n_total}"),
                ));
            }
            ln_fact(n_total) - ln_fact(n_active) - ln_fact(n_total - n_active)
        }
    };
    Ok((nats / std::f64::consts::LN_2).max(0.0))
}
