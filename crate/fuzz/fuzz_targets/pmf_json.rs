#![no_main]

use homolog::prob::{JointPmf, Pmf};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(joint) = JointPmf::from_json(text) {
        let again = JointPmf::from_json(&joint.to_json()).expect("serialized law parses");
        assert_eq!(again.to_json(), joint.to_json());
    }
    if let Ok(pmf) = Pmf::from_json(text) {
        let _ = pmf.entropy(2.0);
    }
});
