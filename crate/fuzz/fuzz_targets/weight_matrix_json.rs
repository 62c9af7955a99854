#![no_main]
use libfuzzer_sys::fuzz_target;
use tempocode::WeightMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(w) = WeightMatrix::from_json(text) {
        assert_eq!(w.as_slice().len(), w.n() * w.n());
        let back = WeightMatrix::from_json(&w.to_json()).expect("round trip");
        let bits = |m: &WeightMatrix| m.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&w));
    }
});
