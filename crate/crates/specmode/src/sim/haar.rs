//! Haar-random unitaries for test-case generation.

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::UnitaryMatrix;

/// Draws an m×m unitary from the Haar measure, deterministically per seed.
///
/// A complex Ginibre matrix is orthonormalized by modified Gram-Schmidt,
/// whose R factor has a real positive diagonal by construction; the Q of
/// that phase-fixed QR decomposition is Haar-distributed.
pub fn haar_random_unitary(m: usize, seed: u64) -> UnitaryMatrix {
    assert!(m >= 1, "need at least one mode");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = move || -> f64 { StandardNormal.sample(&mut rng) };
    let ginibre = Array2::from_shape_fn((m, m), |_| Complex64::new(scale * draw(), scale * draw()));

    // Columns of q are built left to right; one re-orthogonalization pass
    // keeps ||Q†Q - I|| at machine precision even for unlucky draws.
    let mut q = ginibre;
    for j in 0..m {
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = Complex64::ZERO;
                for r in 0..m {
                    proj += q[[r, i]].conj() * q[[r, j]];
                }
                for r in 0..m {
                    let correction = proj * q[[r, i]];
                    q[[r, j]] -= correction;
                }
            }
        }
        let norm = (0..m).map(|r| q[[r, j]].norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(norm > 0.0, "Ginibre column collapsed");
        for r in 0..m {
            q[[r, j]] /= norm;
        }
    }
    UnitaryMatrix::new(q).expect("Gram-Schmidt output is unitary")
}
