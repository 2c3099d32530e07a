#![no_main]
use libfuzzer_sys::fuzz_target;
use specmode::PhotonSource;

// Parsing + invariant validation of the photon wire format must never
// panic, whatever the bytes.
fuzz_target!(|data: &[u8]| {
    if let Ok(photon) = serde_json::from_slice::<PhotonSource>(data) {
        let _ = photon.basis_size();
        let _ = photon.label_probabilities();
        let round_trip = serde_json::to_string(&photon).unwrap();
        let again: PhotonSource = serde_json::from_str(&round_trip).unwrap();
        assert_eq!(again, photon);
    }
});
