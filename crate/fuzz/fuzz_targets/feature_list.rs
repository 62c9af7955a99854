#![no_main]
use std::collections::BTreeMap;

use libfuzzer_sys::fuzz_target;
use tempocode::encoding::{encode, packet_to_json, parse_features, EncoderParams};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(fv) = parse_features(text) {
        let p = encode(&fv, &EncoderParams::default());
        let rendered: BTreeMap<usize, f64> =
            serde_json::from_str(&packet_to_json(&p)).expect("packet renders as id -> time");
        assert_eq!(rendered.len(), p.len());
        assert!(rendered.keys().all(|&id| id < fv.dim()));
    }
});
