#![no_main]
use libfuzzer_sys::fuzz_target;
use tempocode::config::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = Config::from_json(text) {
        // anything accepted must survive its own echo
        let again = Config::from_json(&cfg.to_json()).expect("echoed config parses");
        assert_eq!(again, cfg);
    }
});
