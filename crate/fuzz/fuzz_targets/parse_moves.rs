#![no_main]

use graceful_core::format::{parse_moves, write_moves};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(moves) = parse_moves(text) {
        assert_eq!(parse_moves(&write_moves(&moves)).expect("written moves parse"), moves);
    }
});
