#![no_main]

use homolog::sim::{BoundCheckConfig, Experiment, ExperimentConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        let again = ExperimentConfig::from_json(&cfg.to_json()).expect("serialized config parses");
        assert_eq!(again, cfg);
        let _ = Experiment::new(cfg);
    }
    let _ = serde_json::from_str::<BoundCheckConfig>(text);
});
