//! Output photon-count distributions.
//!
//! Three computations share the permanent machinery:
//!
//! - [`output_distribution`]: ordinary Boson sampling of a Fock input;
//! - [`spatial_distribution_pure`]: pure photons with arbitrary spectral
//!   amplitudes, computed in the enlarged (m·b)-mode space under U ⊗ I_b
//!   and marginalized over spectral labels;
//! - [`spatial_distribution_mixed`]: mixed photons as a classical mixture
//!   over instance vectors — photons sharing a label evolve together,
//!   label groups evolve independently and their counts convolve. Its
//!   cross-check, [`spatial_distribution_mixed_enlarged`], takes the direct
//!   enlarged-space route instead and must agree to ~1e-9; that agreement is
//!   the decomposition claim the hardness module rests on.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::configs::{checked_count, enumerate_configurations, CONFIGURATION_BUDGET};
use super::permanent::permanent;
use super::{OutputConfiguration, OutputDistribution, SimError, UnitaryMatrix};
use crate::numeric::NeumaierSum;
use crate::spectral::{MixtureWeights, PhotonSource, SpectralAmplitudes};

/// Photon budget for plain Fock-input sampling (permanents are 2^n).
pub const MAX_IDEAL_PHOTONS: usize = 7;
/// Photon budget for the enlarged-space computations.
pub const MAX_ENLARGED_PHOTONS: usize = 5;
/// Spectral-basis budget for the enlarged-space computations.
pub const MAX_ENLARGED_BASIS: usize = 4;

/// What a distribution computation is about to do, reportable before the
/// work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostEstimate {
    /// Output configurations to visit (one permanent each).
    pub configurations: u64,
    /// Dimension of each permanent (2^k work per configuration).
    pub permanent_dimension: usize,
}

impl fmt::Display for CostEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} configurations, one {k}x{k} permanent each",
            self.configurations,
            k = self.permanent_dimension
        )
    }
}

impl CostEstimate {
    /// Cost of [`output_distribution`] for n photons over m modes.
    pub fn ideal(m: usize, n: usize) -> Result<Self, SimError> {
        if n > MAX_IDEAL_PHOTONS {
            return Err(SimError::PhotonBudget {
                n,
                max: MAX_IDEAL_PHOTONS,
            });
        }
        Ok(Self {
            configurations: checked_count(m, n, CONFIGURATION_BUDGET)?,
            permanent_dimension: n,
        })
    }

    /// Cost of the enlarged-space routes for n photons, m modes, basis b.
    pub fn enlarged(m: usize, n: usize, b: usize) -> Result<Self, SimError> {
        if n > MAX_ENLARGED_PHOTONS {
            return Err(SimError::PhotonBudget {
                n,
                max: MAX_ENLARGED_PHOTONS,
            });
        }
        if b > MAX_ENLARGED_BASIS {
            return Err(SimError::BasisBudget {
                b,
                max: MAX_ENLARGED_BASIS,
            });
        }
        if m < n {
            return Err(SimError::TooFewModes { m, n });
        }
        Ok(Self {
            configurations: checked_count(m * b.max(1), n, CONFIGURATION_BUDGET)?,
            permanent_dimension: n,
        })
    }
}

fn expand_multiplicities(counts: &[u32]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.iter().map(|&c| c as usize).sum());
    for (mode, &count) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(mode, count as usize));
    }
    out
}

fn occupancy_factorial(counts: &[u32]) -> f64 {
    let mut product = 1.0;
    for &c in counts {
        for k in 2..=c as u64 {
            product *= k as f64;
        }
    }
    product
}

/// P(S) for every output configuration S of a Fock input through U:
/// |Per(A_S)|² / (Π s_j! Π t_k!), where A_S repeats row j of U per input
/// occupancy s_j and column k per output occupancy t_k.
pub fn output_distribution(
    u: &UnitaryMatrix,
    input: &OutputConfiguration,
) -> Result<OutputDistribution, SimError> {
    let m = u.dim();
    if input.modes() != m {
        return Err(SimError::ModeMismatch {
            modes: input.modes(),
            expected: m,
        });
    }
    let n = input.total_photons();
    CostEstimate::ideal(m, n)?;
    let input_rows = expand_multiplicities(input.counts());
    let input_factorial = occupancy_factorial(input.counts());
    let entries = u.entries();
    let configurations = enumerate_configurations(m, n)?;
    let probabilities: Vec<f64> = configurations
        .par_iter()
        .map(|t| {
            let output_cols = expand_multiplicities(t.counts());
            let a =
                Array2::from_shape_fn((n, n), |(p, q)| entries[[input_rows[p], output_cols[q]]]);
            let per = permanent(&a.view()).expect("n is within the permanent budget");
            per.norm_sqr() / (input_factorial * occupancy_factorial(t.counts()))
        })
        .collect();
    Ok(OutputDistribution::from_parts(
        configurations,
        probabilities,
    ))
}

fn require_pure(photons: &[PhotonSource]) -> Result<Vec<&SpectralAmplitudes>, SimError> {
    if photons.is_empty() {
        return Err(SimError::EmptyPhotons);
    }
    photons
        .iter()
        .map(|p| match p {
            PhotonSource::Pure(a) => Ok(a),
            PhotonSource::Mixed(_) => Err(SimError::ExpectedPure),
        })
        .collect()
}

fn require_mixed(photons: &[PhotonSource]) -> Result<Vec<&MixtureWeights>, SimError> {
    if photons.is_empty() {
        return Err(SimError::EmptyPhotons);
    }
    photons
        .iter()
        .map(|p| match p {
            PhotonSource::Mixed(w) => Ok(w),
            PhotonSource::Pure(_) => Err(SimError::ExpectedMixed),
        })
        .collect()
}

/// Enlarged-mode index of spatial mode k and spectral label i.
fn enlarged_index(k: usize, i: usize, b: usize) -> usize {
    k * b + i
}

fn spatial_marginal_of(enlarged_counts: &[u32], m: usize, b: usize) -> Vec<u32> {
    let mut spatial = vec![0u32; m];
    for k in 0..m {
        for i in 0..b {
            spatial[k] += enlarged_counts[enlarged_index(k, i, b)];
        }
    }
    spatial
}

const MARGINAL_CHUNK: usize = 1 << 10;

/// Exact spatial photon-count distribution for pure photons with arbitrary
/// spectral amplitudes. Photon j enters spatial mode j; the network acts as
/// U ⊗ I_b on the enlarged space and spectral labels are traced out at the
/// output.
pub fn spatial_distribution_pure(
    u: &UnitaryMatrix,
    photons: &[PhotonSource],
) -> Result<OutputDistribution, SimError> {
    let amplitudes = require_pure(photons)?;
    let n = amplitudes.len();
    let m = u.dim();
    let b = amplitudes.iter().map(|a| a.basis_size()).max().unwrap_or(1);
    CostEstimate::enlarged(m, n, b)?;

    // Column j holds the network image of photon j's creation operator:
    // B[(k,i), j] = U[j,k] λ_{i,j}.
    let entries = u.entries();
    let network = Array2::from_shape_fn((m * b, n), |(row, j)| {
        let (k, i) = (row / b, row % b);
        entries[[j, k]] * amplitudes[j].coeff(i)
    });

    let spatial_configs = enumerate_configurations(m, n)?;
    let index_of = config_index(&spatial_configs);
    let enlarged = enumerate_configurations(m * b, n)?;

    let partials: Vec<Vec<f64>> = enlarged
        .par_chunks(MARGINAL_CHUNK)
        .map(|chunk| {
            let mut buckets = vec![0.0; spatial_configs.len()];
            for t in chunk {
                let rows = expand_multiplicities(t.counts());
                let a = Array2::from_shape_fn((n, n), |(p, q)| network[[rows[p], q]]);
                let per = permanent(&a.view()).expect("n within permanent budget");
                let probability = per.norm_sqr() / occupancy_factorial(t.counts());
                if probability != 0.0 {
                    let marginal = spatial_marginal_of(t.counts(), m, b);
                    buckets[index_of[marginal.as_slice()]] += probability;
                }
            }
            buckets
        })
        .collect();
    Ok(OutputDistribution::from_parts(
        spatial_configs,
        combine_bucket_partials(partials),
    ))
}

/// Spatial distribution for mixed photons via the instance-vector mixture:
/// D = Σ_v p(v) D_v, where D_v evolves each label group through U on its
/// own and convolves the group count distributions.
pub fn spatial_distribution_mixed(
    u: &UnitaryMatrix,
    photons: &[PhotonSource],
) -> Result<OutputDistribution, SimError> {
    let weights = require_mixed(photons)?;
    let n = weights.len();
    let m = u.dim();
    let b = weights.iter().map(|w| w.basis_size()).max().unwrap_or(1);
    CostEstimate::enlarged(m, n, b)?;

    let spatial_configs = enumerate_configurations(m, n)?;
    let index_of = config_index(&spatial_configs);
    let mut totals = vec![NeumaierSum::new(); spatial_configs.len()];
    let mut group_cache: HashMap<u64, Vec<(Vec<u32>, f64)>> = HashMap::new();
    let mut labels = vec![0u32; n];
    loop {
        let p_v: f64 = labels
            .iter()
            .zip(&weights)
            .map(|(&l, w)| w.weight(l as usize))
            .product();
        if p_v != 0.0 {
            let dist = instance_distribution(u, &labels, b, &mut group_cache)?;
            for (counts, probability) in dist {
                totals[index_of[counts.as_slice()]].add(p_v * probability);
            }
        }
        if !advance_labels(&mut labels, b as u32) {
            break;
        }
    }
    Ok(OutputDistribution::from_parts(
        spatial_configs,
        totals.into_iter().map(|s| s.total().max(0.0)).collect(),
    ))
}

/// The same distribution computed without the independence claim: each
/// instance vector becomes a Fock state on the enlarged space (photon j in
/// mode (j, v_j)), evolves under U ⊗ I_b, and the spectral labels are
/// marginalized. Agreement with [`spatial_distribution_mixed`] validates
/// the decomposition into independent label groups.
pub fn spatial_distribution_mixed_enlarged(
    u: &UnitaryMatrix,
    photons: &[PhotonSource],
) -> Result<OutputDistribution, SimError> {
    let weights = require_mixed(photons)?;
    let n = weights.len();
    let m = u.dim();
    let b = weights.iter().map(|w| w.basis_size()).max().unwrap_or(1);
    CostEstimate::enlarged(m, n, b)?;

    let enlarged_network = tensor_with_identity(u, b);
    let spatial_configs = enumerate_configurations(m, n)?;
    let index_of = config_index(&spatial_configs);
    let mut totals = vec![NeumaierSum::new(); spatial_configs.len()];
    let mut labels = vec![0u32; n];
    loop {
        let p_v: f64 = labels
            .iter()
            .zip(&weights)
            .map(|(&l, w)| w.weight(l as usize))
            .product();
        if p_v != 0.0 {
            let mut counts = vec![0u32; m * b];
            for (j, &l) in labels.iter().enumerate() {
                counts[enlarged_index(j, l as usize, b)] += 1;
            }
            let input = OutputConfiguration::new(counts).expect("nonempty");
            let dist = output_distribution(&enlarged_network, &input)?;
            for (t, probability) in dist.entries() {
                if probability != 0.0 {
                    let marginal = spatial_marginal_of(t.counts(), m, b);
                    totals[index_of[marginal.as_slice()]].add(p_v * probability);
                }
            }
        }
        if !advance_labels(&mut labels, b as u32) {
            break;
        }
    }
    Ok(OutputDistribution::from_parts(
        spatial_configs,
        totals.into_iter().map(|s| s.total().max(0.0)).collect(),
    ))
}

/// U ⊗ I_b on combined index k·b + i.
fn tensor_with_identity(u: &UnitaryMatrix, b: usize) -> UnitaryMatrix {
    let m = u.dim();
    let entries = u.entries();
    let big = Array2::from_shape_fn((m * b, m * b), |(row, col)| {
        let (j, i) = (row / b, row % b);
        let (k, i2) = (col / b, col % b);
        if i == i2 {
            entries[[j, k]]
        } else {
            Complex64::ZERO
        }
    });
    UnitaryMatrix::new(big).expect("tensor of a unitary with the identity is unitary")
}

/// D_v for one instance vector: label groups evolve independently, counts
/// add, so the group distributions convolve.
fn instance_distribution(
    u: &UnitaryMatrix,
    labels: &[u32],
    b: usize,
    cache: &mut HashMap<u64, Vec<(Vec<u32>, f64)>>,
) -> Result<Vec<(Vec<u32>, f64)>, SimError> {
    let m = u.dim();
    let mut accumulated: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    accumulated.insert(vec![0u32; m], 1.0);
    for label in 0..b as u32 {
        let mut mask = 0u64;
        for (j, &l) in labels.iter().enumerate() {
            if l == label {
                mask |= 1 << j;
            }
        }
        if mask == 0 {
            continue;
        }
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(mask) {
            let mut counts = vec![0u32; m];
            for (j, &l) in labels.iter().enumerate() {
                if l == label {
                    counts[j] = 1;
                }
            }
            let input = OutputConfiguration::new(counts).expect("nonempty");
            let dist = output_distribution(u, &input)?;
            e.insert(
                dist.entries()
                    .filter(|(_, p)| *p != 0.0)
                    .map(|(c, p)| (c.counts().to_vec(), p))
                    .collect(),
            );
        }
        let group = &cache[&mask];
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (base, p_base) in &accumulated {
            for (add, p_add) in group {
                let combined: Vec<u32> = base.iter().zip(add).map(|(x, y)| x + y).collect();
                *next.entry(combined).or_insert(0.0) += p_base * p_add;
            }
        }
        accumulated = next;
    }
    Ok(accumulated.into_iter().collect())
}

fn advance_labels(labels: &mut [u32], base: u32) -> bool {
    for slot in labels.iter_mut().rev() {
        *slot += 1;
        if *slot == base {
            *slot = 0;
        } else {
            return true;
        }
    }
    false
}

fn config_index(configs: &[OutputConfiguration]) -> HashMap<&[u32], usize> {
    configs
        .iter()
        .enumerate()
        .map(|(idx, c)| (c.counts(), idx))
        .collect()
}

fn combine_bucket_partials(partials: Vec<Vec<f64>>) -> Vec<f64> {
    let Some(len) = partials.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut sums = vec![NeumaierSum::new(); len];
    for partial in &partials {
        for (sum, &value) in sums.iter_mut().zip(partial) {
            sum.add(value);
        }
    }
    sums.into_iter().map(|s| s.total()).collect()
}
