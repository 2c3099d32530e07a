//! Hardness probabilities over instance vectors.
//!
//! Expanding n imperfect photons over a spectral basis of size b yields one
//! term per instance vector v ∈ {0..b-1}^n: photons sharing a label
//! interfere, the rest run smaller independent experiments. An instance is
//! hard when its largest label multiplicity #(v) reaches `n_hard`, and
//! p_hard is the total probability of hard instances — a product measure
//! Π_j γ_{v_j,j} for mixed photons, |Π_j λ_{v_j,j}|² for pure ones.
//!
//! Three routes compute p_hard: exact enumeration of all b^n vectors,
//! a closed form for identical photons via truncated-exponential generating
//! functions over label occupancies, and a seeded Monte-Carlo estimator for
//! budgets enumeration cannot meet.

mod bounds;

pub use bounds::{
    best_case_pure_sources, binomial_tail, inequality_region, p_hard_lower_bound_fidelity,
    p_hard_lower_bound_mixed, worst_case_pure_sources, RegionRow, TailBound,
};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::{ln_factorial, log_sum_exp, NeumaierSum};
use crate::spectral::{MixtureWeights, PhotonSource};

/// Default cap on the number of enumerated instance vectors.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;
/// Largest photon count accepted by the closed-form identical-photon route.
pub const MAX_IID_PHOTONS: usize = 10_000;
/// The seeded generator used by the Monte-Carlo estimator.
pub const MONTE_CARLO_RNG: &str = "chacha8";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardnessError {
    #[error("a hardness query needs at least one photon")]
    EmptyPhotons,
    #[error("photons must be all pure or all mixed; hybrid lists have no product measure")]
    HybridPhotons,
    #[error("n_hard must be at least 1")]
    InvalidNHard,
    #[error("epsilon {0} is outside the open interval (0, 1)")]
    InvalidEpsilon(f64),
    #[error(
        "enumeration of {terms} instance vectors exceeds the budget of {budget}; \
         use the Monte-Carlo estimator instead"
    )]
    EnumerationBudget { terms: u128, budget: u64 },
    #[error("instance vector of length {got} does not match {expected} photons")]
    LengthMismatch { expected: usize, got: usize },
    #[error("instance vectors must not be empty")]
    EmptyVector,
    #[error("{n} photons exceeds the closed-form limit of {MAX_IID_PHOTONS}")]
    PhotonCountTooLarge { n: usize },
    #[error("purity {0} must lie in (0, 1]")]
    InvalidPurity(f64),
    #[error("fidelity {0} must lie in [0, 1]")]
    InvalidFidelity(f64),
    #[error("the unit upper bound requires n_hard < n, got n_hard = {n_hard}, n = {n}")]
    UpperBoundNeedsSmallerNHard { n_hard: usize, n: usize },
    #[error("Monte-Carlo estimation needs at least one sample")]
    ZeroSamples,
}

/// Assignment of each photon to a spectral basis label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceVector {
    labels: Vec<u32>,
}

impl InstanceVector {
    pub fn new(labels: Vec<u32>) -> Result<Self, HardnessError> {
        if labels.is_empty() {
            return Err(HardnessError::EmptyVector);
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// #(v): the largest number of repetitions of a single label.
    pub fn max_repetition(&self) -> usize {
        let mut sorted = self.labels.clone();
        sorted.sort_unstable();
        let mut best = 1;
        let mut run = 1;
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                run += 1;
                best = best.max(run);
            } else {
                run = 1;
            }
        }
        best
    }
}

/// Parameters of one p_hard computation: the photons, the hardness
/// threshold, and the ε the caller compares p_hard against.
#[derive(Debug, Clone, PartialEq)]
pub struct HardnessQuery {
    photons: Vec<PhotonSource>,
    n_hard: usize,
    epsilon: f64,
}

impl HardnessQuery {
    pub fn new(
        photons: Vec<PhotonSource>,
        n_hard: usize,
        epsilon: f64,
    ) -> Result<Self, HardnessError> {
        if photons.is_empty() {
            return Err(HardnessError::EmptyPhotons);
        }
        let pure = photons[0].is_pure();
        if photons.iter().any(|p| p.is_pure() != pure) {
            return Err(HardnessError::HybridPhotons);
        }
        if n_hard == 0 {
            return Err(HardnessError::InvalidNHard);
        }
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
            return Err(HardnessError::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            photons,
            n_hard,
            epsilon,
        })
    }

    pub fn photons(&self) -> &[PhotonSource] {
        &self.photons
    }

    pub fn n(&self) -> usize {
        self.photons.len()
    }

    pub fn n_hard(&self) -> usize {
        self.n_hard
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn all_pure(&self) -> bool {
        self.photons[0].is_pure()
    }

    /// Ambient basis size: the longest photon vector (shorter ones are
    /// zero-padded).
    pub fn basis_size(&self) -> usize {
        self.photons
            .iter()
            .map(|p| p.basis_size())
            .max()
            .unwrap_or(0)
    }

    fn label_matrix(&self) -> LabelMatrix {
        let b = self.basis_size();
        if self.all_pure() {
            let rows = self
                .photons
                .iter()
                .map(|p| {
                    let PhotonSource::Pure(a) = p else {
                        unreachable!()
                    };
                    let mut row = vec![Complex64::ZERO; b];
                    row[..a.basis_size()].copy_from_slice(a.coeffs());
                    row
                })
                .collect();
            LabelMatrix::Pure(rows)
        } else {
            let rows = self
                .photons
                .iter()
                .map(|p| {
                    let PhotonSource::Mixed(w) = p else {
                        unreachable!()
                    };
                    let mut row = vec![0.0; b];
                    row[..w.basis_size()].copy_from_slice(w.weights());
                    row
                })
                .collect();
            LabelMatrix::Mixed(rows)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HardnessQueryRepr {
    photons: Vec<PhotonSource>,
    n_hard: usize,
    epsilon: f64,
}

impl Serialize for HardnessQuery {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HardnessQueryRepr {
            photons: self.photons.clone(),
            n_hard: self.n_hard,
            epsilon: self.epsilon,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HardnessQuery {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = HardnessQueryRepr::deserialize(deserializer)?;
        HardnessQuery::new(repr.photons, repr.n_hard, repr.epsilon).map_err(D::Error::custom)
    }
}

/// Per-photon label data, padded to the ambient basis size.
enum LabelMatrix {
    Pure(Vec<Vec<Complex64>>),
    Mixed(Vec<Vec<f64>>),
}

impl LabelMatrix {
    fn instance_probability(&self, labels: &[u32]) -> f64 {
        match self {
            LabelMatrix::Mixed(rows) => {
                let mut p = 1.0;
                for (row, &l) in rows.iter().zip(labels) {
                    p *= row.get(l as usize).copied().unwrap_or(0.0);
                }
                p
            }
            LabelMatrix::Pure(rows) => {
                let mut amp = Complex64::new(1.0, 0.0);
                for (row, &l) in rows.iter().zip(labels) {
                    amp *= row.get(l as usize).copied().unwrap_or(Complex64::ZERO);
                }
                amp.norm_sqr()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ExactEnumeration,
    ClosedFormIID,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardnessResult {
    pub p_hard: f64,
    pub method: Method,
    /// √(p̂(1-p̂)/samples); present for Monte-Carlo estimates only.
    pub std_error: Option<f64>,
}

/// p(v): the probability that the photons realize instance vector `v`.
///
/// Labels beyond a photon's stored basis refer to zero-padded modes and
/// contribute zero probability.
pub fn instance_probability(
    query: &HardnessQuery,
    v: &InstanceVector,
) -> Result<f64, HardnessError> {
    if v.labels.len() != query.n() {
        return Err(HardnessError::LengthMismatch {
            expected: query.n(),
            got: v.labels.len(),
        });
    }
    Ok(query.label_matrix().instance_probability(&v.labels))
}

/// Exact p_hard by enumerating all b^n instance vectors, using the default
/// budget of [`DEFAULT_ENUMERATION_BUDGET`] terms.
pub fn p_hard_exact(query: &HardnessQuery) -> Result<HardnessResult, HardnessError> {
    p_hard_exact_with_budget(query, DEFAULT_ENUMERATION_BUDGET)
}

/// Exact p_hard with an explicit enumeration budget.
pub fn p_hard_exact_with_budget(
    query: &HardnessQuery,
    budget: u64,
) -> Result<HardnessResult, HardnessError> {
    let n = query.n();
    if query.n_hard > n {
        // #(v) >= n_hard is the empty event.
        return Ok(HardnessResult {
            p_hard: 0.0,
            method: Method::ExactEnumeration,
            std_error: None,
        });
    }
    let mass = multiplicity_mass(query, budget)?;
    let mut sum = NeumaierSum::new();
    for &m in &mass[query.n_hard..] {
        sum.add(m);
    }
    Ok(HardnessResult {
        p_hard: sum.total().clamp(0.0, 1.0),
        method: Method::ExactEnumeration,
        std_error: None,
    })
}

/// Number of vectors enumerated per parallel work item. Fixed so that the
/// combination order, and therefore the floating-point result, does not
/// depend on the thread count.
const ENUMERATION_CHUNK: u64 = 1 << 14;

/// Total probability mass per maximum label multiplicity, index 1..=n.
fn multiplicity_mass(query: &HardnessQuery, budget: u64) -> Result<Vec<f64>, HardnessError> {
    let n = query.n();
    let b = query.basis_size();
    let terms = (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if terms > budget as u128 {
        return Err(HardnessError::EnumerationBudget { terms, budget });
    }
    let total = terms as u64;
    let matrix = query.label_matrix();
    let chunks = total.div_ceil(ENUMERATION_CHUNK).max(1);
    let partials: Vec<Vec<NeumaierSum>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * ENUMERATION_CHUNK;
            let end = total.min(start + ENUMERATION_CHUNK);
            enumerate_range(&matrix, n, b, start, end)
        })
        .collect();
    let mut mass = vec![NeumaierSum::new(); n + 1];
    for partial in partials {
        for (bucket, part) in mass.iter_mut().zip(partial) {
            bucket.add(part.total());
        }
    }
    Ok(mass.into_iter().map(|s| s.total()).collect())
}

/// Accumulates p(v) into per-multiplicity buckets for vector indices
/// [start, end), in odometer order with the last photon's label fastest.
fn enumerate_range(
    matrix: &LabelMatrix,
    n: usize,
    b: usize,
    start: u64,
    end: u64,
) -> Vec<NeumaierSum> {
    let mut buckets = vec![NeumaierSum::new(); n + 1];
    let mut labels = vec![0u32; n];
    decode_odometer(start, b as u64, &mut labels);
    let mut scratch = MultiplicityScratch::new(n, b);
    for _ in start..end {
        let p = matrix.instance_probability(&labels);
        if p != 0.0 {
            buckets[scratch.max_repetition(&labels)].add(p);
        }
        advance_odometer(&mut labels, b as u32);
    }
    buckets
}

fn decode_odometer(index: u64, base: u64, labels: &mut [u32]) {
    let mut rest = index;
    for slot in labels.iter_mut().rev() {
        *slot = (rest % base) as u32;
        rest /= base;
    }
}

fn advance_odometer(labels: &mut [u32], base: u32) {
    for slot in labels.iter_mut().rev() {
        *slot += 1;
        if *slot == base {
            *slot = 0;
        } else {
            return;
        }
    }
}

/// Counts label multiplicities; a dense array for small bases, sorting for
/// degenerate single-photon queries whose basis can be enormous.
struct MultiplicityScratch {
    counts: Option<Vec<u32>>,
    sort_buf: Vec<u32>,
}

const DENSE_COUNTS_MAX_BASIS: usize = 1 << 16;

impl MultiplicityScratch {
    fn new(n: usize, b: usize) -> Self {
        Self {
            counts: (b <= DENSE_COUNTS_MAX_BASIS).then(|| vec![0u32; b]),
            sort_buf: Vec::with_capacity(n),
        }
    }

    fn max_repetition(&mut self, labels: &[u32]) -> usize {
        match &mut self.counts {
            Some(counts) => {
                let mut best = 0u32;
                for &l in labels {
                    let c = &mut counts[l as usize];
                    *c += 1;
                    best = best.max(*c);
                }
                for &l in labels {
                    counts[l as usize] = 0;
                }
                best as usize
            }
            None => {
                self.sort_buf.clear();
                self.sort_buf.extend_from_slice(labels);
                self.sort_buf.sort_unstable();
                let mut best = 1;
                let mut run = 1;
                for pair in self.sort_buf.windows(2) {
                    if pair[0] == pair[1] {
                        run += 1;
                        best = best.max(run);
                    } else {
                        run = 1;
                    }
                }
                best
            }
        }
    }
}

/// Closed-form p_hard for n identical mixed photons.
///
/// The complement — every label collected fewer than n_hard photons — is an
/// occupancy probability: n! times the x^n coefficient of
/// Π_i Σ_{k<n_hard} (γ_i x)^k / k!. The convolution runs in log space so
/// factorials up to n = 10^4 never overflow.
pub fn p_hard_iid_exact(
    n: usize,
    n_hard: usize,
    weights: &MixtureWeights,
) -> Result<HardnessResult, HardnessError> {
    if n == 0 {
        return Err(HardnessError::EmptyPhotons);
    }
    if n > MAX_IID_PHOTONS {
        return Err(HardnessError::PhotonCountTooLarge { n });
    }
    if n_hard == 0 {
        return Err(HardnessError::InvalidNHard);
    }
    let result = |p_hard| HardnessResult {
        p_hard,
        method: Method::ClosedFormIID,
        std_error: None,
    };
    if n_hard > n {
        return Ok(result(0.0));
    }
    let cap = (n_hard - 1).min(n);
    // Log-coefficients of the running product, in the plain x^k basis.
    let mut poly = vec![f64::NEG_INFINITY; n + 1];
    poly[0] = 0.0;
    let mut factor = vec![f64::NEG_INFINITY; cap + 1];
    let mut next = vec![f64::NEG_INFINITY; n + 1];
    let mut terms = Vec::with_capacity(cap + 1);
    for &w in weights.weights() {
        let ln_w = if w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
        for (k, slot) in factor.iter_mut().enumerate() {
            *slot = if k == 0 {
                0.0
            } else {
                k as f64 * ln_w - ln_factorial(k as u64)
            };
        }
        for (d, slot) in next.iter_mut().enumerate() {
            terms.clear();
            for (k, &f) in factor.iter().enumerate().take(d + 1) {
                terms.push(f + poly[d - k]);
            }
            *slot = log_sum_exp(&terms);
        }
        std::mem::swap(&mut poly, &mut next);
    }
    let ln_p_all_below = ln_factorial(n as u64) + poly[n];
    Ok(result((1.0 - ln_p_all_below.exp()).clamp(0.0, 1.0)))
}

/// Samples drawn per parallel work item; each chunk owns a dedicated ChaCha
/// stream, so the estimate is reproducible for a given seed regardless of
/// thread count.
const MONTE_CARLO_CHUNK: u64 = 1 << 16;

/// Unbiased Monte-Carlo estimate of p_hard.
///
/// Both instance-probability measures are products of independent per-photon
/// categorical distributions, so sampling a vector means one inverse-CDF
/// draw per photon.
pub fn p_hard_monte_carlo(
    query: &HardnessQuery,
    samples: u64,
    seed: u64,
) -> Result<HardnessResult, HardnessError> {
    if samples == 0 {
        return Err(HardnessError::ZeroSamples);
    }
    let n = query.n();
    let b = query.basis_size();
    let cdfs: Vec<Vec<f64>> = query
        .photons
        .iter()
        .map(|p| {
            let mut acc = 0.0;
            p.label_probabilities()
                .into_iter()
                .map(|w| {
                    acc += w;
                    acc
                })
                .collect()
        })
        .collect();
    let chunks = samples.div_ceil(MONTE_CARLO_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * MONTE_CARLO_CHUNK;
            let len = (samples - start).min(MONTE_CARLO_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut scratch = MultiplicityScratch::new(n, b);
            let mut labels = vec![0u32; n];
            let mut hits = 0u64;
            for _ in 0..len {
                for (slot, cdf) in labels.iter_mut().zip(&cdfs) {
                    let u: f64 = rng.random();
                    let idx = cdf.partition_point(|&c| c <= u);
                    *slot = idx.min(cdf.len() - 1) as u32;
                }
                if scratch.max_repetition(&labels) >= query.n_hard {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let estimate = hits as f64 / samples as f64;
    let std_error = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(HardnessResult {
        p_hard: estimate,
        method: Method::MonteCarlo,
        std_error: Some(std_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralAmplitudes;
    use proptest::prelude::*;

    fn pure(coeffs: &[f64]) -> PhotonSource {
        PhotonSource::Pure(
            SpectralAmplitudes::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
                .unwrap(),
        )
    }

    fn basis_state(index: usize, b: usize) -> PhotonSource {
        let mut coeffs = vec![0.0; b];
        coeffs[index] = 1.0;
        pure(&coeffs)
    }

    fn mixed(weights: &[f64]) -> PhotonSource {
        PhotonSource::Mixed(MixtureWeights::new(weights.to_vec()).unwrap())
    }

    fn iv(labels: &[u32]) -> InstanceVector {
        InstanceVector::new(labels.to_vec()).unwrap()
    }

    #[test]
    fn max_repetition_examples() {
        assert_eq!(iv(&[1, 2, 1, 2]).max_repetition(), 2);
        assert_eq!(iv(&[1, 2, 3, 2, 2]).max_repetition(), 3);
        assert_eq!(iv(&[0, 0, 0]).max_repetition(), 3);
        assert_eq!(iv(&[7]).max_repetition(), 1);
    }

    #[test]
    fn query_validation() {
        assert!(matches!(
            HardnessQuery::new(vec![], 1, 0.5),
            Err(HardnessError::EmptyPhotons)
        ));
        assert!(matches!(
            HardnessQuery::new(vec![pure(&[1.0]), mixed(&[1.0])], 1, 0.5),
            Err(HardnessError::HybridPhotons)
        ));
        assert!(matches!(
            HardnessQuery::new(vec![pure(&[1.0])], 0, 0.5),
            Err(HardnessError::InvalidNHard)
        ));
        for eps in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(HardnessQuery::new(vec![pure(&[1.0])], 1, eps).is_err());
        }
    }

    #[test]
    fn query_json_round_trip_and_validation() {
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]), mixed(&[0.25, 0.75])], 2, 0.5).unwrap();
        let json = serde_json::to_string(&q).unwrap();
        let back: HardnessQuery = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q);
        // Hybrid photon lists are rejected at the JSON boundary too.
        let hybrid = r#"{"photons":[{"type":"pure","coeffs":[[1.0,0.0]]},
            {"type":"mixed","weights":[1.0]}],"n_hard":1,"epsilon":0.5}"#;
        assert!(serde_json::from_str::<HardnessQuery>(hybrid).is_err());
    }

    #[test]
    fn instance_probability_examples() {
        // Identical maximally mixed photons: every vector has mass 1/b^n.
        let q = HardnessQuery::new(vec![mixed(&[0.25; 4]); 3], 2, 0.5).unwrap();
        for labels in [[0, 0, 0], [1, 3, 2], [3, 3, 3]] {
            let p = instance_probability(&q, &iv(&labels)).unwrap();
            assert!((p - 1.0 / 64.0).abs() < 1e-15);
        }

        // Identical pure photons in the zeroth basis state.
        let q = HardnessQuery::new(vec![pure(&[1.0, 0.0]); 3], 3, 0.5).unwrap();
        assert_eq!(instance_probability(&q, &iv(&[0, 0, 0])).unwrap(), 1.0);
        assert_eq!(instance_probability(&q, &iv(&[0, 1, 0])).unwrap(), 0.0);

        // Product of per-photon weights.
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]), mixed(&[0.25, 0.75])], 2, 0.5).unwrap();
        assert_eq!(instance_probability(&q, &iv(&[0, 1])).unwrap(), 0.375);

        assert!(matches!(
            instance_probability(&q, &iv(&[0, 1, 0])),
            Err(HardnessError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn p_hard_exact_limiting_cases() {
        // Identical pure photons: always hard, exactly.
        let q = HardnessQuery::new(vec![pure(&[1.0]); 5], 5, 0.5).unwrap();
        assert_eq!(p_hard_exact(&q).unwrap().p_hard, 1.0);

        // Fully distinguishable photons: never hard beyond n_hard = 1.
        let photons: Vec<_> = (0..4).map(|j| basis_state(j, 4)).collect();
        let q = HardnessQuery::new(photons.clone(), 2, 0.5).unwrap();
        assert_eq!(p_hard_exact(&q).unwrap().p_hard, 0.0);
        let q1 = HardnessQuery::new(photons, 1, 0.5).unwrap();
        assert!((p_hard_exact(&q1).unwrap().p_hard - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p_hard_exact_maximally_mixed_pair() {
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]); 2], 2, 0.5).unwrap();
        let r = p_hard_exact(&q).unwrap();
        assert_eq!(r.method, Method::ExactEnumeration);
        assert!((r.p_hard - 0.5).abs() < 1e-15);
    }

    #[test]
    fn p_hard_exact_handles_degenerate_thresholds() {
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]); 2], 3, 0.5).unwrap();
        assert_eq!(p_hard_exact(&q).unwrap().p_hard, 0.0);
    }

    #[test]
    fn p_hard_exact_respects_budget() {
        let q = HardnessQuery::new(vec![mixed(&[0.25; 4]); 4], 2, 0.5).unwrap();
        assert!(matches!(
            p_hard_exact_with_budget(&q, 255),
            Err(HardnessError::EnumerationBudget { terms: 256, .. })
        ));
        assert!(p_hard_exact_with_budget(&q, 256).is_ok());
    }

    #[test]
    fn p_hard_exact_is_monotone_in_n_hard() {
        let photons = vec![
            mixed(&[0.5, 0.3, 0.2]),
            mixed(&[0.1, 0.8, 0.1]),
            mixed(&[0.4, 0.4, 0.2]),
            mixed(&[0.25, 0.5, 0.25]),
        ];
        let mut previous = f64::INFINITY;
        for n_hard in 1..=5 {
            let q = HardnessQuery::new(photons.clone(), n_hard, 0.5).unwrap();
            let p = p_hard_exact(&q).unwrap().p_hard;
            assert!(p <= previous + 1e-15, "n_hard={n_hard}: {p} > {previous}");
            previous = p;
        }
    }

    #[test]
    fn enumeration_is_identical_across_thread_counts() {
        let photons = vec![
            mixed(&[0.37, 0.41, 0.22]),
            mixed(&[0.11, 0.29, 0.6]),
            mixed(&[0.5, 0.25, 0.25]),
            mixed(&[0.2, 0.35, 0.45]),
            mixed(&[0.6, 0.3, 0.1]),
        ];
        let q = HardnessQuery::new(photons, 3, 0.5).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| p_hard_exact(&q).unwrap().p_hard);
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| p_hard_exact(&q).unwrap().p_hard);
        assert_eq!(single.to_bits(), four.to_bits());

        let mc_single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| p_hard_monte_carlo(&q, 200_000, 7).unwrap().p_hard);
        let mc_four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| p_hard_monte_carlo(&q, 200_000, 7).unwrap().p_hard);
        assert_eq!(mc_single.to_bits(), mc_four.to_bits());
    }

    #[test]
    fn iid_closed_form_examples() {
        let uniform2 = MixtureWeights::maximally_mixed(2).unwrap();
        let r = p_hard_iid_exact(2, 2, &uniform2).unwrap();
        assert_eq!(r.method, Method::ClosedFormIID);
        assert!((r.p_hard - 0.5).abs() < 1e-12);

        let uniform3 = MixtureWeights::maximally_mixed(3).unwrap();
        let r = p_hard_iid_exact(3, 3, &uniform3).unwrap();
        assert!((r.p_hard - 1.0 / 9.0).abs() < 1e-12);

        // n_hard = 1 is certain, n_hard > n impossible.
        let skew = MixtureWeights::new(vec![0.9, 0.1]).unwrap();
        assert_eq!(p_hard_iid_exact(5, 1, &skew).unwrap().p_hard, 1.0);
        assert_eq!(p_hard_iid_exact(5, 6, &skew).unwrap().p_hard, 0.0);

        // Pigeonhole: b*(n_hard-1) < n forces a hard instance.
        assert_eq!(p_hard_iid_exact(3, 2, &uniform2).unwrap().p_hard, 1.0);

        assert!(matches!(
            p_hard_iid_exact(MAX_IID_PHOTONS + 1, 2, &uniform2),
            Err(HardnessError::PhotonCountTooLarge { .. })
        ));
    }

    #[test]
    fn iid_closed_form_matches_enumeration() {
        let cases = [
            (vec![0.5, 0.5], 4),
            (vec![0.7, 0.2, 0.1], 5),
            (vec![0.25, 0.25, 0.25, 0.25], 6),
            (vec![0.05, 0.15, 0.3, 0.5], 7),
        ];
        for (weights, n) in cases {
            let w = MixtureWeights::new(weights).unwrap();
            let photons = vec![PhotonSource::Mixed(w.clone()); n];
            for n_hard in 1..=n + 1 {
                let q = HardnessQuery::new(photons.clone(), n_hard, 0.5).unwrap();
                let exact = p_hard_exact(&q).unwrap().p_hard;
                let closed = p_hard_iid_exact(n, n_hard, &w).unwrap().p_hard;
                assert!(
                    (exact - closed).abs() < 1e-10,
                    "b={} n={n} n_hard={n_hard}: {exact} vs {closed}",
                    w.basis_size()
                );
            }
        }
    }

    #[test]
    fn monte_carlo_degenerate_distribution() {
        let q = HardnessQuery::new(vec![pure(&[1.0]); 4], 4, 0.5).unwrap();
        let r = p_hard_monte_carlo(&q, 10_000, 123).unwrap();
        assert_eq!(r.p_hard, 1.0);
        assert_eq!(r.std_error, Some(0.0));
        assert_eq!(r.method, Method::MonteCarlo);
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        // n_hard = n keeps the exact value at 0.25, away from the degenerate
        // endpoints, so distinct seeds are distinguishable.
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]); 3], 3, 0.5).unwrap();
        let a = p_hard_monte_carlo(&q, 100_000, 42).unwrap();
        let b = p_hard_monte_carlo(&q, 100_000, 42).unwrap();
        assert_eq!(a.p_hard.to_bits(), b.p_hard.to_bits());
        let c = p_hard_monte_carlo(&q, 100_000, 43).unwrap();
        assert_ne!(a.p_hard.to_bits(), c.p_hard.to_bits());
    }

    #[test]
    fn monte_carlo_agrees_with_exact_within_five_sigma() {
        let q = HardnessQuery::new(vec![mixed(&[0.5, 0.5]); 2], 2, 0.5).unwrap();
        let exact = p_hard_exact(&q).unwrap().p_hard;
        for seed in [1u64, 2, 3] {
            let r = p_hard_monte_carlo(&q, 1_000_000, seed).unwrap();
            let sigma = r.std_error.unwrap();
            assert!(
                (r.p_hard - exact).abs() <= 5.0 * sigma,
                "seed {seed}: {} vs {exact} (sigma {sigma})",
                r.p_hard
            );
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form_on_a_large_case() {
        let w = MixtureWeights::maximally_mixed(4).unwrap();
        let closed = p_hard_iid_exact(12, 6, &w).unwrap().p_hard;
        let photons = vec![PhotonSource::Mixed(w); 12];
        let q = HardnessQuery::new(photons, 6, 0.5).unwrap();
        let r = p_hard_monte_carlo(&q, 1_000_000, 9).unwrap();
        let sigma = r.std_error.unwrap().max(f64::EPSILON);
        assert!(
            (r.p_hard - closed).abs() <= 4.0 * sigma,
            "{} vs {closed} (sigma {sigma})",
            r.p_hard
        );
    }

    #[test]
    fn worst_case_sources_reproduce_the_fidelity_tail() {
        let f_min = 0.36;
        let n = 3;
        let photons = worst_case_pure_sources(f_min, n).unwrap();
        for n_hard in 2..=n {
            let q = HardnessQuery::new(photons.clone(), n_hard, 0.5).unwrap();
            let exact = p_hard_exact(&q).unwrap().p_hard;
            let tail = binomial_tail(f_min, n, n_hard);
            assert!((exact - tail).abs() < 1e-12, "n_hard={n_hard}");
        }
    }

    #[test]
    fn best_case_sources_examples() {
        let q = HardnessQuery::new(best_case_pure_sources(0.7, 4).unwrap(), 3, 0.5).unwrap();
        assert!((p_hard_exact(&q).unwrap().p_hard - 1.0).abs() < 1e-12);

        let q = HardnessQuery::new(best_case_pure_sources(0.7, 2).unwrap(), 2, 0.5).unwrap();
        assert!((p_hard_exact(&q).unwrap().p_hard - 0.7).abs() < 1e-12);
    }

    prop_compose! {
        fn arb_mixed_photons(max_b: usize, max_n: usize)
            (b in 1..=max_b, n in 1..=max_n)
            (rows in prop::collection::vec(
                prop::collection::vec(0.01f64..1.0, b..=b), n..=n))
        -> Vec<PhotonSource> {
            rows.into_iter().map(|raw| {
                let total: f64 = raw.iter().sum();
                PhotonSource::Mixed(
                    MixtureWeights::new(raw.into_iter().map(|w| w / total).collect()).unwrap(),
                )
            }).collect()
        }
    }

    prop_compose! {
        fn arb_pure_photons(max_b: usize, max_n: usize)
            (b in 1..=max_b, n in 1..=max_n)
            (rows in prop::collection::vec(
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), b..=b)
                    .prop_filter("nonzero", |r| {
                        r.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-3
                    }),
                n..=n))
        -> Vec<PhotonSource> {
            rows.into_iter().map(|raw| {
                PhotonSource::Pure(SpectralAmplitudes::normalize(
                    raw.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
                ).unwrap())
            }).collect()
        }
    }

    fn total_mass(query: &HardnessQuery) -> f64 {
        // Independent accumulation over all vectors, without the bucket
        // machinery: sum p(v) directly in odometer order.
        let n = query.n();
        let b = query.basis_size();
        let mut labels = vec![0u32; n];
        let mut sum = NeumaierSum::new();
        let total = (b as u64).pow(n as u32);
        for _ in 0..total {
            sum.add(
                instance_probability(query, &InstanceVector::new(labels.clone()).unwrap()).unwrap(),
            );
            advance_odometer(&mut labels, b as u32);
        }
        sum.total()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mixed_instance_probabilities_are_complete(photons in arb_mixed_photons(3, 4)) {
            let q = HardnessQuery::new(photons, 1, 0.5).unwrap();
            prop_assert!((total_mass(&q) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pure_instance_probabilities_are_complete(photons in arb_pure_photons(3, 4)) {
            let q = HardnessQuery::new(photons, 1, 0.5).unwrap();
            prop_assert!((total_mass(&q) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn purity_bound_holds_against_enumeration(photons in arb_mixed_photons(3, 1)) {
            // Identical mixed photons, every n and n_hard in a small range.
            let w = match &photons[0] {
                PhotonSource::Mixed(w) => w.clone(),
                PhotonSource::Pure(_) => unreachable!(),
            };
            for n in 1..=5usize {
                let q = HardnessQuery::new(
                    vec![PhotonSource::Mixed(w.clone()); n], 1, 0.5).unwrap();
                let mass = multiplicity_mass(&q, DEFAULT_ENUMERATION_BUDGET).unwrap();
                for n_hard in 1..=n {
                    let exact: f64 = mass[n_hard..].iter().sum();
                    let bound = p_hard_lower_bound_mixed(w.purity(), n, n_hard)
                        .unwrap()
                        .value;
                    prop_assert!(bound <= exact + 1e-10,
                        "n={n} n_hard={n_hard}: bound {bound} > exact {exact}");
                }
            }
        }
    }
}
