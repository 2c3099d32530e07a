//! JSON config files and their merge with command-line flags.

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use specmode::{decompose, FunctionBasis, PhotonSource, UnitaryMatrix, WavepacketSpec};

use crate::{map_sim_error, CliError, CommonOpts};

pub fn load_json<T: serde::de::DeserializeOwned + Default>(
    path: Option<&Path>,
) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Inclusive linear grid; steps = 1 degenerates to the start point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Largest accepted grid; keeps adversarial configs from allocating
/// arbitrarily much.
pub const MAX_GRID_STEPS: usize = 1_000_001;

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.steps == 0 {
            return Err(CliError::config("grid steps must be positive"));
        }
        if self.steps > MAX_GRID_STEPS {
            return Err(CliError::config(format!(
                "grid of {} steps exceeds the limit of {MAX_GRID_STEPS}",
                self.steps
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(CliError::config(format!(
                "invalid grid range [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| self.start + i as f64 * step)
            .collect())
    }
}

/// Parameters for `phard` commands. Photons are given either directly or as
/// wavepackets decomposed onto a basis.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhardConfig {
    pub photons: Option<Vec<PhotonSource>>,
    pub wavepackets: Option<Vec<WavepacketSpec>>,
    pub basis: Option<FunctionBasis>,
    pub weights: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub n_hard: Option<usize>,
    pub epsilon: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub purity: Option<f64>,
    pub f_min: Option<f64>,
}

impl PhardConfig {
    /// Resolves the photon list: explicit photons win over wavepackets.
    pub fn resolve_photons(&self) -> Result<Option<Vec<PhotonSource>>, CliError> {
        photons_from_parts(&self.photons, &self.wavepackets, &self.basis)
    }
}

/// Explicit photons win; otherwise wavepackets are decomposed onto the
/// given basis into pure photons.
fn photons_from_parts(
    photons: &Option<Vec<PhotonSource>>,
    wavepackets: &Option<Vec<WavepacketSpec>>,
    basis: &Option<FunctionBasis>,
) -> Result<Option<Vec<PhotonSource>>, CliError> {
    match (photons, wavepackets) {
        (Some(photons), _) => Ok(Some(photons.clone())),
        (None, Some(packets)) => {
            let basis = basis
                .as_ref()
                .ok_or_else(|| CliError::config("wavepackets need a basis to decompose onto"))?;
            let photons = packets
                .iter()
                .map(|p| {
                    decompose(p, basis)
                        .map(|d| PhotonSource::Pure(d.amplitudes))
                        .map_err(|e| CliError::config(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some(photons))
        }
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureConfig {
    /// Success-parameter grid: purity for `purity`, fidelity otherwise.
    pub grid: Option<GridSpec>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub n: Option<usize>,
    pub n_hard: Option<usize>,
    pub n_hard_min: Option<usize>,
    pub n_hard_max: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitarySpec {
    Haar { seed: Option<u64> },
    File { path: String },
    Matrix { entries: Vec<Vec<[f64; 2]>> },
    Identity,
    Beamsplitter,
    Permutation { perm: Vec<usize> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub m: Option<usize>,
    pub unitary: Option<UnitarySpec>,
    pub input: Option<Vec<u32>>,
    pub photons: Option<Vec<PhotonSource>>,
    pub wavepackets: Option<Vec<WavepacketSpec>>,
    pub basis: Option<FunctionBasis>,
    pub seed: Option<u64>,
    pub fidelity: Option<f64>,
    pub oracle: Option<bool>,
}

impl SimulateConfig {
    pub fn resolve_photons(&self) -> Result<Option<Vec<PhotonSource>>, CliError> {
        photons_from_parts(&self.photons, &self.wavepackets, &self.basis)
    }
}

/// Builds the network unitary for `simulate`; `m` is the mode count the
/// caller already settled on, `seed_override` is the --seed flag.
pub fn resolve_unitary(
    spec: Option<&UnitarySpec>,
    m: usize,
    seed_override: Option<u64>,
) -> Result<UnitaryMatrix, CliError> {
    if m == 0 {
        return Err(CliError::config("network needs at least one mode"));
    }
    let spec = spec.cloned().unwrap_or(UnitarySpec::Haar { seed: None });
    match spec {
        UnitarySpec::Haar { seed } => {
            let seed = seed_override.or(seed).unwrap_or(0);
            Ok(specmode::haar_random_unitary(m, seed))
        }
        UnitarySpec::File { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::config(format!("cannot read {path}: {e}")))?;
            let entries: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{path}: {e}")))?;
            matrix_from_entries(&entries)
        }
        UnitarySpec::Matrix { entries } => matrix_from_entries(&entries),
        UnitarySpec::Identity => UnitaryMatrix::identity(m).map_err(map_sim_error),
        UnitarySpec::Beamsplitter => Ok(UnitaryMatrix::beamsplitter_50_50()),
        UnitarySpec::Permutation { perm } => {
            UnitaryMatrix::permutation(&perm).map_err(map_sim_error)
        }
    }
}

/// Largest accepted explicit network; the unitarity check is O(m³) and
/// nothing beyond this size fits the simulation budgets anyway.
pub const MAX_EXPLICIT_MODES: usize = 64;

pub fn matrix_from_entries(entries: &[Vec<[f64; 2]>]) -> Result<UnitaryMatrix, CliError> {
    let m = entries.len();
    if m == 0 || entries.iter().any(|row| row.len() != m) {
        return Err(CliError::config(
            "unitary matrix must be square and nonempty",
        ));
    }
    if m > MAX_EXPLICIT_MODES {
        return Err(CliError::config(format!(
            "{m}-mode network exceeds the {MAX_EXPLICIT_MODES}-mode limit"
        )));
    }
    let array = Array2::from_shape_fn((m, m), |(i, j)| {
        Complex64::new(entries[i][j][0], entries[i][j][1])
    });
    UnitaryMatrix::new(array).map_err(map_sim_error)
}

/// Flag-over-config merge helpers.
pub fn merged<T: Copy>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

pub fn require<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::config(format!("{what} is required (flag or config)")))
}

impl CommonOpts {
    pub fn merged_seed(&self, config: Option<u64>) -> Option<u64> {
        merged(self.seed, config)
    }
}
