#![no_main]
use libfuzzer_sys::fuzz_target;
use specmode_cli::config::{FigureConfig, PhardConfig, SimulateConfig};

// Every config schema the CLI reads, plus the cheap post-parse validation
// (grids, photon lists). Wavepacket decomposition is excluded: it runs
// quadrature and is exercised by the test suite instead.
fuzz_target!(|data: &[u8]| {
    if let Ok(config) = serde_json::from_slice::<PhardConfig>(data) {
        if config.wavepackets.is_none() {
            let _ = config.resolve_photons();
        }
    }
    if let Ok(config) = serde_json::from_slice::<FigureConfig>(data) {
        if let Some(grid) = config.grid {
            let _ = grid.values();
        }
    }
    if let Ok(config) = serde_json::from_slice::<SimulateConfig>(data) {
        if config.wavepackets.is_none() {
            let _ = config.resolve_photons();
        }
    }
});
