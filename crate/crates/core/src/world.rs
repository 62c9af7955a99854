//! Synthetic objects and noisy traversals over them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::types::{Contact, FeatureVector, Traversal};

pub const SMOOTH: usize = 0;
pub const CURVED: usize = 1;
pub const EDGE: usize = 2;

pub const F_SMOOTH: [f64; 3] = [0.9, 0.2, 0.1];
pub const F_CURVED: [f64; 3] = [0.2, 0.8, 0.2];
pub const F_EDGE: [f64; 3] = [0.1, 0.2, 0.9];

/// An object as the canonical left-to-right sequence of contact features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticObject {
    pub label: String,
    pub contacts: Vec<FeatureVector>,
}

impl SyntheticObject {
    pub fn new(label: impl Into<String>, contacts: Vec<FeatureVector>) -> Result<Self> {
        let obj = Self {
            label: label.into(),
            contacts,
        };
        obj.validate()?;
        Ok(obj)
    }

    fn from_arrays(label: &str, contacts: &[[f64; 3]]) -> Self {
        let contacts = contacts
            .iter()
            .map(|c| FeatureVector::new(c.to_vec()).expect("finite constants"))
            .collect();
        Self {
            label: label.to_string(),
            contacts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .contacts
            .first()
            .ok_or_else(|| Error::Traversal(format!("object `{}` has no contacts", self.label)))?;
        for c in &self.contacts {
            if c.dim() != first.dim() {
                return Err(Error::Dimension {
                    expected: first.dim(),
                    actual: c.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.contacts[0].dim()
    }
}

pub fn object_a() -> SyntheticObject {
    SyntheticObject::from_arrays("A", &[F_SMOOTH, F_CURVED, F_EDGE])
}

pub fn object_b() -> SyntheticObject {
    SyntheticObject::from_arrays("B", &[F_EDGE, F_CURVED, F_SMOOTH])
}

pub fn uniform_object() -> SyntheticObject {
    SyntheticObject::from_arrays("Uniform", &[F_SMOOTH, F_SMOOTH, F_SMOOTH])
}

pub fn moderate_object() -> SyntheticObject {
    SyntheticObject::from_arrays("Moderate", &[F_SMOOTH, F_CURVED, F_SMOOTH])
}

pub fn complex_object() -> SyntheticObject {
    SyntheticObject::from_arrays("Complex", &[F_SMOOTH, F_CURVED, F_EDGE])
}

/// Objects A (S-C-E) and B (E-C-S), then Uniform, Moderate and Complex.
pub fn builtin_objects() -> Vec<SyntheticObject> {
    vec![
        object_a(),
        object_b(),
        uniform_object(),
        moderate_object(),
        complex_object(),
    ]
}

/// Parses a user object file: either one `{ "label", "contacts" }` object or
/// an array of them. All objects must share a dimension.
pub fn parse_objects(input: &str) -> Result<Vec<SyntheticObject>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        One(SyntheticObject),
        Many(Vec<SyntheticObject>),
    }
    let objects = match serde_json::from_str::<Doc>(input)? {
        Doc::One(o) => vec![o],
        Doc::Many(v) => v,
    };
    let first = objects
        .first()
        .ok_or_else(|| Error::Parse("object file lists no objects".into()))?;
    first.validate()?;
    let dim = first.dim();
    for o in &objects {
        o.validate()?;
        if o.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: o.dim(),
            });
        }
    }
    Ok(objects)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldParams {
    /// Std of the per-component Gaussian sensor noise.
    pub noise_sigma: f64,
    /// seconds between consecutive contacts
    pub inter_contact_interval: f64,
    /// world units per second
    pub velocity: f64,
    pub seed: u64,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            noise_sigma: 0.05,
            inter_contact_interval: 0.020,
            velocity: 1.0,
            seed: 42,
        }
    }
}

impl WorldParams {
    pub fn validate(&self, tau_base: f64) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param(
                "noise_sigma",
                "must be finite and non-negative",
            ));
        }
        if !(self.inter_contact_interval > tau_base && self.inter_contact_interval.is_finite()) {
            return Err(Error::param(
                "inter_contact_interval",
                format!(
                    "must exceed the packet span {tau_base} s, got {}",
                    self.inter_contact_interval
                ),
            ));
        }
        if !(self.velocity > 0.0 && self.velocity.is_finite()) {
            return Err(Error::param("velocity", "must be positive and finite"));
        }
        Ok(())
    }
}

/// One noisy left-to-right sweep over `obj`.
///
/// Contact `k` happens at `k · interval`, at position `velocity · t_k` along
/// the x axis, and every activation gets independent `N(0, σ²)` noise drawn
/// from the sub-stream `key ++ [k, component]`. Noise is not clipped.
pub fn generate_traversal(
    obj: &SyntheticObject,
    params: &WorldParams,
    key: &[u64],
    min_gap: f64,
) -> Result<Traversal> {
    let direction: f64 = 0.0;
    let mut path = key.to_vec();
    path.extend([0, 0]);
    let depth = path.len();
    let contacts = obj
        .contacts
        .iter()
        .enumerate()
        .map(|(k, canonical)| {
            path[depth - 2] = k as u64;
            let values = canonical
                .as_slice()
                .iter()
                .enumerate()
                .map(|(c, &v)| {
                    if params.noise_sigma == 0.0 {
                        return v;
                    }
                    path[depth - 1] = c as u64;
                    v + params.noise_sigma * SplitMix64::stream(params.seed, &path).next_gaussian()
                })
                .collect();
            let time = k as f64 * params.inter_contact_interval;
            let dist = params.velocity * time;
            Ok(Contact {
                features: FeatureVector::new(values)?,
                time,
                position: [dist * direction.cos(), dist * direction.sin(), 0.0],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Traversal::new(contacts, direction, obj.label.clone(), min_gap)
}
