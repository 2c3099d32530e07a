//! Analytic bounds on the hardness probability.
//!
//! Both bounds are binomial tails: for identical mixed photons of purity P
//! the chance that at least `n_hard` of n photons land in one fixed basis
//! state is Σ_{k≥n_hard} C(n,k) P^k (1-P)^{n-k}, a lower bound on p_hard;
//! the same tail in the worst-case pairwise fidelity F_min bounds the pure
//! case from below, and p_hard ≤ 1 holds whenever n_hard < n.

use num_complex::Complex64;

use crate::numeric::{binomial_u128, ln_binomial, NeumaierSum};
use crate::spectral::{PhotonSource, SpectralAmplitudes};

use super::HardnessError;

/// Largest n for which C(n,k) is computed as an exact integer; tails for
/// larger n work in log space (f64 factorials overflow near n = 170, and
/// exact coefficients stop fitting in the 53-bit mantissa near n = 57).
const EXACT_COEFFICIENT_MAX_N: usize = 50;

/// Σ_{k=k_min}^{n} C(n,k) p^k (1-p)^{n-k} with compensated summation.
pub fn binomial_tail(p: f64, n: usize, k_min: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if k_min > n {
        return 0.0;
    }
    if k_min == 0 {
        return 1.0;
    }
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let total = if n <= EXACT_COEFFICIENT_MAX_N {
        tail_exact_coefficients(p, n, k_min)
    } else {
        tail_log_space(p, n, k_min)
    };
    total.clamp(0.0, 1.0)
}

fn tail_exact_coefficients(p: f64, n: usize, k_min: usize) -> f64 {
    let q = 1.0 - p;
    let mut sum = NeumaierSum::new();
    for k in k_min..=n {
        let coeff = binomial_u128(n as u64, k as u64).expect("fits u128 for n <= 50") as f64;
        sum.add(coeff * p.powi(k as i32) * q.powi((n - k) as i32));
    }
    sum.total()
}

fn tail_log_space(p: f64, n: usize, k_min: usize) -> f64 {
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut sum = NeumaierSum::new();
    for k in k_min..=n {
        let ln_term = ln_binomial(n as u64, k as u64) + k as f64 * ln_p + (n - k) as f64 * ln_q;
        sum.add(ln_term.exp());
    }
    sum.total()
}

/// A binomial-tail bound value; `empty_event` flags the degenerate request
/// n_hard > n, where the bounded event is empty and the bound is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub value: f64,
    pub empty_event: bool,
}

/// Lower bound on p_hard for n identical mixed photons of the given purity.
pub fn p_hard_lower_bound_mixed(
    purity: f64,
    n: usize,
    n_hard: usize,
) -> Result<TailBound, HardnessError> {
    if !purity.is_finite() || purity <= 0.0 || purity > 1.0 {
        return Err(HardnessError::InvalidPurity(purity));
    }
    if n_hard == 0 {
        return Err(HardnessError::InvalidNHard);
    }
    Ok(tail_bound(purity, n, n_hard))
}

/// Lower bound on p_hard for n pure photons whose worst pairwise fidelity
/// is `f_min`.
pub fn p_hard_lower_bound_fidelity(
    f_min: f64,
    n: usize,
    n_hard: usize,
) -> Result<TailBound, HardnessError> {
    if !f_min.is_finite() || !(0.0..=1.0).contains(&f_min) {
        return Err(HardnessError::InvalidFidelity(f_min));
    }
    if n_hard == 0 {
        return Err(HardnessError::InvalidNHard);
    }
    Ok(tail_bound(f_min, n, n_hard))
}

fn tail_bound(success: f64, n: usize, n_hard: usize) -> TailBound {
    if n_hard > n {
        TailBound {
            value: 0.0,
            empty_event: true,
        }
    } else {
        TailBound {
            value: binomial_tail(success, n, n_hard),
            empty_event: false,
        }
    }
}

/// One grid point of the combined-bound region table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegionRow {
    pub f_min: f64,
    pub lower_bound: f64,
    /// Whether the lower bound already exceeds ε; outside this region the
    /// device is definitely not hard, inside it may be.
    pub in_region: bool,
}

/// Evaluates the combined bound lower_bound ≤ p_hard ≤ 1 over a fidelity
/// grid. Requires n_hard < n: the unit upper bound is derived from a
/// best-case state that needs a second instance vector to exist.
pub fn inequality_region(
    f_min_grid: &[f64],
    n: usize,
    n_hard: usize,
    epsilon: f64,
) -> Result<Vec<RegionRow>, HardnessError> {
    if n_hard == 0 {
        return Err(HardnessError::InvalidNHard);
    }
    if n_hard >= n {
        return Err(HardnessError::UpperBoundNeedsSmallerNHard { n_hard, n });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(HardnessError::InvalidEpsilon(epsilon));
    }
    f_min_grid
        .iter()
        .map(|&f_min| {
            let bound = p_hard_lower_bound_fidelity(f_min, n, n_hard)?;
            Ok(RegionRow {
                f_min,
                lower_bound: bound.value,
                in_region: bound.value > epsilon,
            })
        })
        .collect()
}

/// The worst-case arrangement for a given pairwise overlap: every photon
/// shares amplitude √f_min on basis index 0 and keeps the remainder on a
/// private index, so any coincidence of labels happens on index 0 and
/// p_hard collapses to the binomial tail exactly.
pub fn worst_case_pure_sources(f_min: f64, n: usize) -> Result<Vec<PhotonSource>, HardnessError> {
    if !f_min.is_finite() || !(0.0..=1.0).contains(&f_min) {
        return Err(HardnessError::InvalidFidelity(f_min));
    }
    if n == 0 {
        return Err(HardnessError::EmptyPhotons);
    }
    let shared = f_min.sqrt();
    let private = (1.0 - f_min).sqrt();
    Ok((0..n)
        .map(|i| {
            let mut coeffs = vec![Complex64::ZERO; n + 1];
            coeffs[0] = Complex64::new(shared, 0.0);
            coeffs[i + 1] = Complex64::new(private, 0.0);
            PhotonSource::Pure(SpectralAmplitudes::new(coeffs).expect("construction is normalized"))
        })
        .collect())
}

/// The best-case arrangement: all photons identical except the first, which
/// has overlap √f_min (fidelity f_min) with the rest. Only the instance
/// vectors (0,...,0) and (1,0,...,0) survive, with probabilities f_min and
/// 1 - f_min.
pub fn best_case_pure_sources(f_min: f64, n: usize) -> Result<Vec<PhotonSource>, HardnessError> {
    if !f_min.is_finite() || !(0.0..=1.0).contains(&f_min) {
        return Err(HardnessError::InvalidFidelity(f_min));
    }
    if n == 0 {
        return Err(HardnessError::EmptyPhotons);
    }
    let shared = f_min.sqrt();
    let rest = (1.0 - f_min).sqrt();
    let odd_one =
        SpectralAmplitudes::new(vec![Complex64::new(shared, 0.0), Complex64::new(rest, 0.0)])
            .expect("normalized");
    let reference = SpectralAmplitudes::new(vec![Complex64::new(1.0, 0.0), Complex64::ZERO])
        .expect("normalized");
    let mut photons = vec![PhotonSource::Pure(odd_one)];
    photons.extend((1..n).map(|_| PhotonSource::Pure(reference.clone())));
    Ok(photons)
}
