//! Single-photon spectral structure over an abstract orthonormal mode basis.
//!
//! The basis itself is just an index set here; concrete mode functions live
//! in [`crate::wavepacket`]. A pure photon is a complex amplitude vector, a
//! mixed photon a probability vector, both indexed by basis label. Vectors of
//! different length compare by zero-padding the shorter one, since appending
//! unused orthonormal modes never changes a state.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::NeumaierSum;

/// Tolerance accepted on Σ|λ|² = 1 and Σγ = 1 at construction time.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("coefficient vector must not be empty")]
    Empty,
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("squared norm {norm_sq} deviates from 1 by more than {NORMALIZATION_TOLERANCE}")]
    NotNormalized { norm_sq: f64 },
    #[error("cannot normalize a zero-norm coefficient vector")]
    ZeroNorm,
    #[error("mixture weight {weight} at index {index} is negative")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("mixture weights sum to {sum}, expected 1 within {NORMALIZATION_TOLERANCE}")]
    WeightSumInvalid { sum: f64 },
}

/// Complex amplitudes λ of a spectrally pure photon, with Σ|λ_i|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAmplitudes {
    coeffs: Vec<Complex64>,
}

impl SpectralAmplitudes {
    /// Accepts an already-normalized coefficient vector; rejects anything
    /// off by more than [`NORMALIZATION_TOLERANCE`] rather than silently
    /// rescaling (use [`SpectralAmplitudes::normalize`] for that).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.is_empty() {
            return Err(SpectralError::Empty);
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(SpectralError::NonFinite);
        }
        let norm_sq = norm_sq(&coeffs);
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(SpectralError::NotNormalized { norm_sq });
        }
        Ok(Self { coeffs })
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalize(coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.is_empty() {
            return Err(SpectralError::Empty);
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(SpectralError::NonFinite);
        }
        let norm = norm_sq(&coeffs).sqrt();
        if norm == 0.0 {
            return Err(SpectralError::ZeroNorm);
        }
        let rescaled = coeffs.iter().map(|c| c / norm).collect();
        Ok(Self { coeffs: rescaled })
    }

    pub fn basis_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at basis index `i`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(Complex64::ZERO)
    }

    /// ⟨self|other⟩ = Σ_i λ_i* μ_i, zero-padding the shorter vector.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for i in 0..len {
            let term = self.coeff(i).conj() * other.coeff(i);
            re.add(term.re);
            im.add(term.im);
        }
        Complex64::new(re.total(), im.total())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// The label-sampling distribution |λ_i|² of this photon.
    pub fn label_probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }
}

fn norm_sq(coeffs: &[Complex64]) -> f64 {
    let mut sum = NeumaierSum::new();
    for c in coeffs {
        sum.add(c.norm_sqr());
    }
    sum.total()
}

/// Probability weights γ of a spectrally mixed photon, diagonal in the mode
/// basis, with Σγ_i = 1 and γ_i ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    weights: Vec<f64>,
}

impl MixtureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self, SpectralError> {
        if weights.is_empty() {
            return Err(SpectralError::Empty);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(SpectralError::NegativeWeight { index, weight });
            }
        }
        let mut sum = NeumaierSum::new();
        for &w in &weights {
            sum.add(w);
        }
        let sum = sum.total();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(SpectralError::WeightSumInvalid { sum });
        }
        Ok(Self { weights })
    }

    /// Uniform mixture over `b` basis states (purity 1/b).
    pub fn maximally_mixed(b: usize) -> Result<Self, SpectralError> {
        if b == 0 {
            return Err(SpectralError::Empty);
        }
        Self::new(vec![1.0 / b as f64; b])
    }

    pub fn basis_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at basis index `i`, zero beyond the stored length.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(i).copied().unwrap_or(0.0)
    }

    /// tr(ρ²) = Σ_i γ_i², in [1/b, 1].
    pub fn purity(&self) -> f64 {
        let mut sum = NeumaierSum::new();
        for &w in &self.weights {
            sum.add(w * w);
        }
        sum.total()
    }
}

/// A single photon's spectral state: a uniform handle over the pure and
/// mixed cases.
#[derive(Debug, Clone, PartialEq)]
pub enum PhotonSource {
    Pure(SpectralAmplitudes),
    Mixed(MixtureWeights),
}

impl PhotonSource {
    pub fn is_pure(&self) -> bool {
        matches!(self, PhotonSource::Pure(_))
    }

    pub fn basis_size(&self) -> usize {
        match self {
            PhotonSource::Pure(a) => a.basis_size(),
            PhotonSource::Mixed(w) => w.basis_size(),
        }
    }

    /// Probability of finding this photon in each basis label.
    pub fn label_probabilities(&self) -> Vec<f64> {
        match self {
            PhotonSource::Pure(a) => a.label_probabilities(),
            PhotonSource::Mixed(w) => w.weights().to_vec(),
        }
    }
}

// Wire format: {"type":"pure","coeffs":[[re,im],...]} or
// {"type":"mixed","weights":[...]}. Deserialization re-validates the
// invariants so external JSON cannot smuggle in an unnormalized state.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum PhotonSourceRepr {
    Pure { coeffs: Vec<[f64; 2]> },
    Mixed { weights: Vec<f64> },
}

impl Serialize for PhotonSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            PhotonSource::Pure(a) => PhotonSourceRepr::Pure {
                coeffs: a.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            },
            PhotonSource::Mixed(w) => PhotonSourceRepr::Mixed {
                weights: w.weights().to_vec(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PhotonSource {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match PhotonSourceRepr::deserialize(deserializer)? {
            PhotonSourceRepr::Pure { coeffs } => {
                let coeffs = coeffs
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect();
                SpectralAmplitudes::new(coeffs)
                    .map(PhotonSource::Pure)
                    .map_err(D::Error::custom)
            }
            PhotonSourceRepr::Mixed { weights } => MixtureWeights::new(weights)
                .map(PhotonSource::Mixed)
                .map_err(D::Error::custom),
        }
    }
}
