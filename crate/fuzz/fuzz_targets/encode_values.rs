#![no_main]
use libfuzzer_sys::fuzz_target;
use tempocode::encoding::{encode_values, EncoderParams};

fuzz_target!(|data: &[u8]| {
    let values: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let params = EncoderParams::default();
    match encode_values(&values, &params) {
        Ok(p) => {
            let order = p.firing_order();
            if let Some(&(_, t0)) = order.first() {
                assert_eq!(t0, 0.0);
            }
            for w in order.windows(2) {
                assert!(w[0].1 < w[1].1);
                assert!(values[w[0].0] >= values[w[1].0]);
            }
            assert!(order
                .iter()
                .all(|&(i, t)| values[i] > params.threshold && t < params.tau_base));
        }
        Err(_) => assert!(values.is_empty() || values.iter().any(|v| !v.is_finite())),
    }
});
