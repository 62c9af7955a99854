//! Rank-order temporal coding for sensorimotor object inference.
//!
//! A sensor contact produces a dense activation vector. Instead of summing
//! those vectors (which forgets the order in which features were met), each
//! contact is turned into a *spike packet* whose firing order is the
//! activation ranking. STDP between consecutive packets writes the traversal
//! direction into a per-object weight matrix, and an evidence accumulator with
//! a learnable memory coefficient λ turns per-contact scores into a running
//! object hypothesis.
//!
//! The crate also ships the synthetic world, the dense nearest-centroid
//! baseline and the three validation experiments (traversal discrimination,
//! noise sweep, λ convergence).

pub mod baseline;
pub mod config;
pub mod encoding;
pub mod error;
pub mod evidence;
pub mod experiments;
pub mod inference;
pub mod latency;
pub mod report;
pub mod rng;
pub mod stdp;
pub mod types;
pub mod world;

pub use error::{Error, Result};
pub use types::{
    Contact, Displacement, EvidenceState, FeatureVector, LatencyParams, SpikePacket, StdpParams,
    Traversal, WeightMatrix,
};
