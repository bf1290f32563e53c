#![no_main]

use homolog::channel::ChannelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = ChannelSpec::from_json(text) {
        let again = ChannelSpec::from_json(&c.to_json()).expect("serialized channel parses");
        assert_eq!(again.to_json(), c.to_json());
        for i in 0..c.r() {
            c.receiver(i).expect("every receiver is selectable");
        }
    }
});
