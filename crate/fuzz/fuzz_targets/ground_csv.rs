#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(parsed) = hofstadter::io::read_ground_csv(text) {
            assert_eq!(parsed.amplitudes.len(), parsed.rows * parsed.cols);
        }
    }
});
