#![no_main]

use graceful_core::format::{parse_labeling, write_labeling};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_labeling(text) {
        let again = parse_labeling(&write_labeling(&f)).expect("written labeling parses");
        assert_eq!(again, f);
    }
});
