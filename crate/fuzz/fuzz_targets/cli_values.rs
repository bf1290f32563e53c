#![no_main]

use homolog_cli::parse::{parse_binary_rows, parse_counts, parse_field, parse_numbers, parse_pmf_spec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pmfs) = parse_pmf_spec(text, &[2, 4]) {
        assert_eq!(pmfs.len(), 2);
        assert_eq!(pmfs[1].len(), 4);
    }
    let _ = parse_numbers(text);
    let _ = parse_counts(text);
    let _ = parse_binary_rows(text);
    let _ = parse_field(text);
});
