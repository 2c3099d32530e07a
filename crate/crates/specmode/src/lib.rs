//! Boson-sampling with imperfect photons.
//!
//! `specmode` models the spectral structure of single photons entering a
//! passive linear-optical network and asks how often such a device still runs
//! a large interference experiment. A photon is either spectrally pure (a
//! complex amplitude vector over an orthonormal mode basis) or spectrally
//! mixed (a probability vector over the same basis). Expanding the joint
//! input over basis labels turns an imperfect experiment into a classical
//! mixture of ideal ones: photons sharing a label interfere, photons with
//! distinct labels evolve independently. The probability that at least
//! `n_hard` photons share a label is the hardness probability `p_hard`.
//!
//! The crate provides:
//!
//! - [`spectral`] — amplitude/weight vectors, overlap, fidelity, purity;
//! - [`wavepacket`] — continuous spectral functions and their numerical
//!   decomposition onto a Hermite-Gauss basis;
//! - [`hardness`] — exact, closed-form and Monte-Carlo computation of
//!   `p_hard`, plus the analytic binomial-tail bounds;
//! - [`sim`] — an exact small-scale linear-optics simulator (permanents,
//!   output distributions, Haar-random unitaries) used to validate the
//!   label-decomposition picture against first principles.
//!
//! All types are immutable values and all operations are pure functions;
//! everything is safe to share across threads. Parallel kernels are
//! deterministic: results do not depend on thread count or scheduling.

pub mod hardness;
pub mod numeric;
pub mod quadrature;
pub mod sim;
pub mod spectral;
pub mod wavepacket;

pub use hardness::{
    best_case_pure_sources, inequality_region, instance_probability, p_hard_exact,
    p_hard_exact_with_budget, p_hard_iid_exact, p_hard_lower_bound_fidelity,
    p_hard_lower_bound_mixed, p_hard_monte_carlo, worst_case_pure_sources, HardnessError,
    HardnessQuery, HardnessResult, InstanceVector, Method, RegionRow, TailBound,
    DEFAULT_ENUMERATION_BUDGET, MAX_IID_PHOTONS, MONTE_CARLO_RNG,
};
pub use sim::{
    enumerate_configurations, haar_random_unitary, output_distribution, permanent,
    spatial_distribution_mixed, spatial_distribution_mixed_enlarged, spatial_distribution_pure,
    OutputConfiguration, OutputDistribution, SimError, UnitaryMatrix,
};
pub use spectral::{MixtureWeights, PhotonSource, SpectralAmplitudes, SpectralError};
pub use wavepacket::{
    basis_gram, continuous_overlap, decompose, BasisFamily, Decomposition, FunctionBasis,
    PulseShape, WavepacketError, WavepacketSpec,
};
