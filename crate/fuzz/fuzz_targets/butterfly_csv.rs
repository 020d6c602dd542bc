#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(parsed) = hofstadter::io::read_butterfly_csv(text) {
            assert_eq!(parsed.alphas.len(), parsed.energies.len());
        }
    }
});
