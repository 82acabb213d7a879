#![no_main]

use graceful_core::format::{parse_matrix, write_matrix};
use graceful_core::matrix::{is_completely_graceful, matrix_to_graph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        let written = write_matrix(&m);
        let again = parse_matrix(&written).expect("written matrix parses");
        assert_eq!(write_matrix(&again), written);
        // Downstream readers must reject bad metadata, not panic on it.
        let _ = is_completely_graceful(&m);
        let _ = matrix_to_graph(&m);
    }
});
