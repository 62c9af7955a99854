//! Exponential-window STDP and traversal-level training.

use crate::error::{Error, Result};
use crate::types::{SpikePacket, StdpParams, WeightMatrix};

/// Weight change for one pre/post spike pair, `dt = post - pre`.
///
/// Causal pairs (`dt > 0`) potentiate by `A+ · exp(-dt/τ+)`, anti-causal pairs
/// depress by `A- · exp(dt/τ-)`, coincident spikes leave the weight alone.
pub fn stdp_delta(pre_time: f64, post_time: f64, params: &StdpParams) -> f64 {
    let dt = post_time - pre_time;
    if dt > 0.0 {
        params.a_plus * (-dt / params.tau_plus).exp()
    } else if dt < 0.0 {
        -params.a_minus * (dt / params.tau_minus).exp()
    } else {
        0.0
    }
}

pub fn stdp_update(w: f64, pre_time: f64, post_time: f64, params: &StdpParams) -> f64 {
    w + stdp_delta(pre_time, post_time, params)
}

/// Applies STDP over every consecutive packet pair of a traversal.
///
/// For each `(prev, cur)` pair, every neuron `i` active in `prev` is paired
/// with every neuron `j` active in `cur` using global spike times. Pairs
/// inside one packet and pairs between non-adjacent packets are not touched.
pub fn train_on_traversal(
    w: &WeightMatrix,
    packets: &[SpikePacket],
    params: &StdpParams,
) -> Result<WeightMatrix> {
    let mut out = w.clone();
    train_in_place(&mut out, packets, params)?;
    Ok(out)
}

pub fn train_in_place(
    w: &mut WeightMatrix,
    packets: &[SpikePacket],
    params: &StdpParams,
) -> Result<()> {
    let n = w.n();
    for p in packets {
        if let Some(id) = p.max_neuron() {
            if id >= n {
                return Err(Error::NeuronOutOfRange { id, n });
            }
        }
    }
    for pair in packets.windows(2) {
        apply_pair(w, &pair[0], &pair[1], params);
    }
    Ok(())
}

/// STDP over one `prev × cur` product set. Ids must already be in range.
pub(crate) fn apply_pair(
    w: &mut WeightMatrix,
    prev: &SpikePacket,
    cur: &SpikePacket,
    params: &StdpParams,
) {
    for (i, ti) in prev.iter() {
        let pre = prev.arrival() + ti;
        for (j, tj) in cur.iter() {
            let post = cur.arrival() + tj;
            let mut v = stdp_update(w.get(i, j), pre, post, params);
            if let Some(c) = params.clip {
                v = v.clamp(-c, c);
            }
            w.set(i, j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;

    fn p() -> StdpParams {
        StdpParams::default()
    }

    #[test]
    fn window_examples() {
        let e = (-1f64).exp();
        assert!((stdp_update(0.0, 0.0, 0.020, &p()) - 0.01 * e).abs() < 1e-15);
        assert_eq!(stdp_update(0.5, 0.3, 0.3, &p()), 0.5);
        assert!((stdp_update(0.0, 0.020, 0.0, &p()) + 0.01 * e).abs() < 1e-15);
    }

    #[test]
    fn short_traversals_leave_weights_alone() {
        let w = WeightMatrix::zeros(3);
        assert_eq!(train_on_traversal(&w, &[], &p()).unwrap(), w);
        let one = SpikePacket::new([(0, 0.0)].into_iter().collect(), 0.0, 0.01).unwrap();
        assert_eq!(train_on_traversal(&w, &[one], &p()).unwrap(), w);
    }

    #[test]
    fn out_of_range_neuron_rejected() {
        let a = SpikePacket::new([(0, 0.0)].into_iter().collect(), 0.0, 0.01).unwrap();
        let b = SpikePacket::new([(5, 0.0)].into_iter().collect(), 0.02, 0.01).unwrap();
        assert_eq!(
            train_on_traversal(&WeightMatrix::zeros(3), &[a, b], &p()),
            Err(Error::NeuronOutOfRange { id: 5, n: 3 })
        );
    }

    #[test]
    fn clip_bounds_weights() {
        let params = StdpParams {
            a_plus: 1.0,
            clip: Some(0.5),
            ..Default::default()
        };
        let mk = |t: f64| {
            let m: BTreeMap<_, _> = [(0, 0.0)].into_iter().collect();
            SpikePacket::new(m, t, 0.01).unwrap()
        };
        let packets: Vec<_> = (0..5)
            .map(|k| mk(k as f64 * 0.001 + k as f64 * 0.02))
            .collect();
        let w = train_on_traversal(&WeightMatrix::zeros(1), &packets, &params).unwrap();
        assert_eq!(w.get(0, 0), 0.5);
    }
}
