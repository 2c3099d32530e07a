#![no_main]
use libfuzzer_sys::fuzz_target;
use specmode_cli::config::matrix_from_entries;

// Network files are untrusted input: square/finite/unitary validation must
// reject garbage without panicking.
fuzz_target!(|data: &[u8]| {
    if let Ok(entries) = serde_json::from_slice::<Vec<Vec<[f64; 2]>>>(data) {
        if let Ok(u) = matrix_from_entries(&entries) {
            assert!(u.dim() >= 1);
        }
    }
});
