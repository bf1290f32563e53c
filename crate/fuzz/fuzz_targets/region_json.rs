#![no_main]

use homolog::region::RateRegion;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(region) = RateRegion::from_json(text) {
        let json = region.to_json();
        assert_eq!(RateRegion::from_json(&json).expect("round trip").to_json(), json);
        let _ = region.symmetric_rate();
        let _ = region.vertices();
    }
});
