#![no_main]

use homolog::code::HomologousEnsemble;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = HomologousEnsemble::from_json(text) {
        let json = e.to_json();
        assert_eq!(HomologousEnsemble::from_json(&json).expect("round trip").to_json(), json);
    }
});
