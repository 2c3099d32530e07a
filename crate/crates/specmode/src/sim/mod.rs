//! Exact small-scale linear-optics simulation.
//!
//! Output probabilities of Fock states through a passive network are squared
//! permanents of submatrices of the network unitary. Everything here is
//! exact (up to f64) and budget-gated: the point is to validate the
//! label-decomposition picture used by [`crate::hardness`] against a direct
//! enlarged-space computation, not to scale.

mod configs;
mod distribution;
mod haar;
mod permanent;

pub use configs::{count_configurations, enumerate_configurations, CONFIGURATION_BUDGET};
pub use distribution::{
    output_distribution, spatial_distribution_mixed, spatial_distribution_mixed_enlarged,
    spatial_distribution_pure, CostEstimate, MAX_ENLARGED_BASIS, MAX_ENLARGED_PHOTONS,
    MAX_IDEAL_PHOTONS,
};
pub use haar::haar_random_unitary;
pub use permanent::{permanent, MAX_PERMANENT_SIZE};

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

/// Elementwise tolerance on U†U = I.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not unitary: max |U†U - I| element is {max_deviation}")]
    NotUnitary { max_deviation: f64 },
    #[error("permanent of size {size} exceeds the 2^k budget cap of {max}")]
    PermanentTooLarge { size: usize, max: usize },
    #[error("need at least one mode")]
    NoModes,
    #[error("{count} output configurations exceed the budget of {budget}")]
    ConfigurationBudget { count: u128, budget: u64 },
    #[error("{n} photons exceed the budget of {max} for this operation")]
    PhotonBudget { n: usize, max: usize },
    #[error("spectral basis of size {b} exceeds the budget of {max}")]
    BasisBudget { b: usize, max: usize },
    #[error("configuration has {modes} modes, network has {expected}")]
    ModeMismatch { modes: usize, expected: usize },
    #[error("{n} photons need at least {n} input modes, network has {m}")]
    TooFewModes { m: usize, n: usize },
    #[error("this operation expects spectrally pure photons")]
    ExpectedPure,
    #[error("this operation expects spectrally mixed photons")]
    ExpectedMixed,
    #[error("need at least one photon")]
    EmptyPhotons,
    #[error("not a permutation of the mode indices")]
    InvalidPermutation,
}

/// An m×m unitary network matrix; row = input mode, column = output mode,
/// i.e. a†_j → Σ_k U_{jk} a†_k.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: Array2<Complex64>,
}

impl UnitaryMatrix {
    /// Validates squareness and U†U = I within [`UNITARITY_TOLERANCE`].
    pub fn new(entries: Array2<Complex64>) -> Result<Self, SimError> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(SimError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SimError::NoModes);
        }
        if entries
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(SimError::NonFinite);
        }
        let mut max_deviation = 0.0f64;
        for i in 0..rows {
            for j in 0..rows {
                let mut dot = Complex64::ZERO;
                for k in 0..rows {
                    dot += entries[[k, i]].conj() * entries[[k, j]];
                }
                let expected = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::ZERO
                };
                max_deviation = max_deviation.max((dot - expected).norm());
            }
        }
        if max_deviation > UNITARITY_TOLERANCE {
            return Err(SimError::NotUnitary { max_deviation });
        }
        Ok(Self { entries })
    }

    pub fn identity(m: usize) -> Result<Self, SimError> {
        if m == 0 {
            return Err(SimError::NoModes);
        }
        Ok(Self {
            entries: Array2::from_diag_elem(m, Complex64::new(1.0, 0.0)),
        })
    }

    /// The real Hadamard 50:50 beamsplitter [[1, 1], [1, -1]] / √2.
    pub fn beamsplitter_50_50() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let entries = Array2::from_shape_vec(
            (2, 2),
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        )
        .expect("2x2 shape");
        Self { entries }
    }

    /// Mode-relabeling network: input mode j exits as mode perm[j].
    pub fn permutation(perm: &[usize]) -> Result<Self, SimError> {
        let m = perm.len();
        if m == 0 {
            return Err(SimError::NoModes);
        }
        let mut seen = vec![false; m];
        for &p in perm {
            if p >= m || seen[p] {
                return Err(SimError::InvalidPermutation);
            }
            seen[p] = true;
        }
        let mut entries = Array2::zeros((m, m));
        for (j, &p) in perm.iter().enumerate() {
            entries[[j, p]] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }
}

/// Photon occupation numbers per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OutputConfiguration {
    counts: Vec<u32>,
}

impl OutputConfiguration {
    pub fn new(counts: Vec<u32>) -> Result<Self, SimError> {
        if counts.is_empty() {
            return Err(SimError::NoModes);
        }
        Ok(Self { counts })
    }

    /// The standard n-photon input (1, ..., 1, 0, ..., 0) over m modes.
    pub fn first_modes(n: usize, m: usize) -> Result<Self, SimError> {
        if n > m {
            return Err(SimError::TooFewModes { m, n });
        }
        let mut counts = vec![0u32; m.max(1)];
        for slot in counts.iter_mut().take(n) {
            *slot = 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn total_photons(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }
}

/// A full photon-count distribution over every configuration of n photons in
/// m modes, in the canonical enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    configurations: Vec<OutputConfiguration>,
    probabilities: Vec<f64>,
}

impl OutputDistribution {
    pub(crate) fn from_parts(
        configurations: Vec<OutputConfiguration>,
        probabilities: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(configurations.len(), probabilities.len());
        Self {
            configurations,
            probabilities,
        }
    }

    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&OutputConfiguration, f64)> {
        self.configurations
            .iter()
            .zip(self.probabilities.iter().copied())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn configurations(&self) -> &[OutputConfiguration] {
        &self.configurations
    }

    /// Probability of one configuration; the list is in descending
    /// lexicographic order, so this is a binary search.
    pub fn probability_of(&self, counts: &[u32]) -> Option<f64> {
        self.configurations
            .binary_search_by(|c| {
                counts
                    .partial_cmp(c.counts())
                    .expect("total order on count vectors")
            })
            .ok()
            .map(|idx| self.probabilities[idx])
    }

    pub fn total_probability(&self) -> f64 {
        let mut sum = crate::numeric::NeumaierSum::new();
        for &p in &self.probabilities {
            sum.add(p);
        }
        sum.total()
    }

    /// Largest absolute pointwise deviation from another distribution on the
    /// same (m, n) space.
    pub fn max_abs_deviation(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.configurations, other.configurations);
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
