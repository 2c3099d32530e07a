//! Continuous spectral distribution functions and their decomposition onto
//! an orthonormal Hermite-Gauss basis.
//!
//! Conventions: a Gaussian wavepacket with bandwidth σ has intensity |ψ(ω)|²
//! equal to a normal density with standard deviation σ; a temporal delay τ
//! enters as the spectral phase e^{-iωτ}. The Hermite-Gauss basis is scaled
//! so that its zeroth function equals a zero-delay Gaussian wavepacket with
//! bandwidth = `scale` at the same center, which makes "matched" inputs easy
//! to construct. Integrals formally run over (0, ∞); because constructors
//! require `center_frequency ≥ 8 × width`, the tail below ω = 0 is < 1e-30
//! and quadrature over an effective real-line window is exact to tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::NeumaierSum;
use crate::quadrature::integrate_segmented;
use crate::spectral::SpectralAmplitudes;

/// Absolute quadrature tolerance requested per integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// An overlap whose error estimate exceeds this did not converge.
pub const OVERLAP_ERROR_LIMIT: f64 = 1e-8;
/// Decompositions leaving at least this much spectral mass outside the basis
/// are rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

const SUPPORT_SIGMAS: f64 = 12.0;
const MIN_CENTER_WIDTHS: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WavepacketError {
    #[error("bandwidth/scale must be positive and finite, got {0}")]
    WidthNotPositive(f64),
    #[error("basis size must be at least 1")]
    EmptyBasis,
    #[error("parameters must be finite")]
    NonFinite,
    #[error(
        "center_frequency {center} is below {MIN_CENTER_WIDTHS} widths ({minimum}); \
         the tail below zero frequency would not be negligible"
    )]
    CenterBelowSupport { center: f64, minimum: f64 },
    #[error("overlap quadrature did not converge: error estimate {error_estimate}")]
    OverlapNotConverged { error_estimate: f64 },
    #[error(
        "basis of size {basis_size} truncates the wavepacket: residual mass {residual} \
         (limit {RESIDUAL_LIMIT}); {}",
        match .sufficient_size {
            Some(b) => format!("size {b} would suffice"),
            None => format!("no size up to {} sufficed", .probed_up_to),
        }
    )]
    Truncation {
        basis_size: usize,
        residual: f64,
        sufficient_size: Option<usize>,
        probed_up_to: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    Gaussian,
}

/// A normalized continuous spectral distribution function ψ(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    shape: PulseShape,
    center_frequency: f64,
    bandwidth: f64,
    temporal_delay: f64,
}

impl WavepacketSpec {
    pub fn gaussian(
        center_frequency: f64,
        bandwidth: f64,
        temporal_delay: f64,
    ) -> Result<Self, WavepacketError> {
        if !center_frequency.is_finite() || !temporal_delay.is_finite() {
            return Err(WavepacketError::NonFinite);
        }
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(WavepacketError::WidthNotPositive(bandwidth));
        }
        let minimum = MIN_CENTER_WIDTHS * bandwidth;
        if center_frequency < minimum {
            return Err(WavepacketError::CenterBelowSupport {
                center: center_frequency,
                minimum,
            });
        }
        Ok(Self {
            shape: PulseShape::Gaussian,
            center_frequency,
            bandwidth,
            temporal_delay,
        })
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn temporal_delay(&self) -> f64 {
        self.temporal_delay
    }

    /// ψ(ω) = (2πσ²)^{-1/4} exp(-(ω-ω₀)²/(4σ²)) e^{-iωτ}.
    pub fn amplitude(&self, omega: f64) -> Complex64 {
        let sigma = self.bandwidth;
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let d = omega - self.center_frequency;
        let envelope = norm * (-d * d / (4.0 * sigma * sigma)).exp();
        envelope * Complex64::new(0.0, -omega * self.temporal_delay).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    HermiteGauss,
}

/// A finite orthonormal basis {ξ_i(ω)}, i = 0..size-1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionBasis {
    family: BasisFamily,
    center_frequency: f64,
    scale: f64,
    size: usize,
}

impl FunctionBasis {
    pub fn hermite_gauss(
        center_frequency: f64,
        scale: f64,
        size: usize,
    ) -> Result<Self, WavepacketError> {
        if !center_frequency.is_finite() {
            return Err(WavepacketError::NonFinite);
        }
        if !scale.is_finite() || scale <= 0.0 {
            return Err(WavepacketError::WidthNotPositive(scale));
        }
        if size == 0 {
            return Err(WavepacketError::EmptyBasis);
        }
        let minimum = MIN_CENTER_WIDTHS * scale;
        if center_frequency < minimum {
            return Err(WavepacketError::CenterBelowSupport {
                center: center_frequency,
                minimum,
            });
        }
        Ok(Self {
            family: BasisFamily::HermiteGauss,
            center_frequency,
            scale,
            size,
        })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn center_frequency(&self) -> f64 {
        self.center_frequency
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn with_size(&self, size: usize) -> Self {
        Self { size, ..*self }
    }

    /// Scale units covering the classical turning point of the highest
    /// order, with margin for the evanescent tail.
    fn support_radius_in_scales(&self) -> usize {
        ((2.0 * self.size as f64 + 1.0).sqrt() * std::f64::consts::SQRT_2 + 4.0).ceil() as usize
    }

    fn quadrature_feature(&self) -> Feature {
        Feature {
            center: self.center_frequency,
            width: self.scale,
            radius: self.support_radius_in_scales(),
        }
    }

    /// ξ_i(ω) for 0 ≤ i < size. Real-valued for the Hermite-Gauss family.
    pub fn eval(&self, order: usize, omega: f64) -> f64 {
        debug_assert!(order < self.size);
        let u = self.scale * std::f64::consts::SQRT_2;
        let x = (omega - self.center_frequency) / u;
        // Orthonormal Hermite functions by stable three-term recurrence:
        // phi_0 = pi^{-1/4} e^{-x²/2}, phi_{k+1} = x sqrt(2/(k+1)) phi_k
        // - sqrt(k/(k+1)) phi_{k-1}. No factorial overflow at any order.
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        for k in 0..order {
            let kf = k as f64;
            let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        cur / u.sqrt()
    }
}

/// A localized structure of the integrand: breakpoints are laid out every
/// `width` over ±`radius` widths around `center`, so the first rule
/// evaluation of each segment samples the feature rather than skipping it.
struct Feature {
    center: f64,
    width: f64,
    radius: usize,
}

impl WavepacketSpec {
    fn quadrature_feature(&self) -> Feature {
        Feature {
            center: self.center_frequency,
            width: self.bandwidth,
            radius: SUPPORT_SIGMAS as usize,
        }
    }
}

fn breakpoints(features: &[Feature]) -> Vec<f64> {
    let mut points = Vec::new();
    for f in features {
        for k in -(f.radius as i64)..=(f.radius as i64) {
            points.push(f.center + k as f64 * f.width);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    let span = points.last().unwrap() - points.first().unwrap();
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * span.max(1.0));
    points
}

/// ∫ ψ_p(ω)* ψ_q(ω) dω by adaptive quadrature.
pub fn continuous_overlap(
    p: &WavepacketSpec,
    q: &WavepacketSpec,
) -> Result<Complex64, WavepacketError> {
    let grid = breakpoints(&[p.quadrature_feature(), q.quadrature_feature()]);
    let result = integrate_segmented(
        |omega| p.amplitude(omega).conj() * q.amplitude(omega),
        &grid,
        QUADRATURE_TOLERANCE,
    );
    if result.error_estimate > OVERLAP_ERROR_LIMIT {
        return Err(WavepacketError::OverlapNotConverged {
            error_estimate: result.error_estimate,
        });
    }
    Ok(result.value)
}

/// Outcome of projecting a wavepacket onto a finite basis.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Coefficients renormalized onto the unit sphere (the raw vector misses
    /// `residual` of the spectral mass).
    pub amplitudes: SpectralAmplitudes,
    /// 1 - Σ|λ_i|² of the raw projection; always below [`RESIDUAL_LIMIT`].
    pub residual: f64,
}

/// λ_i = ∫ ξ_i(ω)* ψ(ω) dω for each basis function.
///
/// Fails if the basis captures too little of the wavepacket; the error
/// names a sufficient size when one exists within the probed range, so
/// truncation never silently skews downstream distinguishability numbers.
pub fn decompose(
    p: &WavepacketSpec,
    basis: &FunctionBasis,
) -> Result<Decomposition, WavepacketError> {
    let coeffs = projection_coefficients(p, basis);
    let captured = captured_mass(&coeffs);
    let residual = 1.0 - captured;
    if residual >= RESIDUAL_LIMIT {
        return Err(truncation_error(p, basis, residual, coeffs));
    }
    let scale = captured.sqrt();
    let amplitudes = SpectralAmplitudes::normalize(coeffs.iter().map(|c| c / scale).collect())
        .expect("projection of a normalized wavepacket has nonzero mass");
    Ok(Decomposition {
        amplitudes,
        residual,
    })
}

fn projection_coefficients(p: &WavepacketSpec, basis: &FunctionBasis) -> Vec<Complex64> {
    let grid = breakpoints(&[p.quadrature_feature(), basis.quadrature_feature()]);
    (0..basis.size)
        .map(|order| {
            integrate_segmented(
                |omega| basis.eval(order, omega) * p.amplitude(omega),
                &grid,
                QUADRATURE_TOLERANCE,
            )
            .value
        })
        .collect()
}

fn captured_mass(coeffs: &[Complex64]) -> f64 {
    let mut sum = NeumaierSum::new();
    for c in coeffs {
        sum.add(c.norm_sqr());
    }
    sum.total()
}

const PROBE_EXTRA_ORDERS: usize = 64;

fn truncation_error(
    p: &WavepacketSpec,
    basis: &FunctionBasis,
    residual: f64,
    coeffs: Vec<Complex64>,
) -> WavepacketError {
    // Extend the projection order by order to name a basis size that would
    // capture enough mass.
    let probed_up_to = basis.size + PROBE_EXTRA_ORDERS;
    let probe = basis.with_size(probed_up_to);
    let grid = breakpoints(&[p.quadrature_feature(), probe.quadrature_feature()]);
    let mut mass = NeumaierSum::new();
    for c in &coeffs {
        mass.add(c.norm_sqr());
    }
    let mut sufficient_size = None;
    for order in basis.size..probed_up_to {
        let lambda = integrate_segmented(
            |omega| probe.eval(order, omega) * p.amplitude(omega),
            &grid,
            QUADRATURE_TOLERANCE,
        )
        .value;
        mass.add(lambda.norm_sqr());
        if 1.0 - mass.total() < RESIDUAL_LIMIT {
            sufficient_size = Some(order + 1);
            break;
        }
    }
    WavepacketError::Truncation {
        basis_size: basis.size,
        residual,
        sufficient_size,
        probed_up_to,
    }
}

/// Pairwise inner products ∫ ξ_i ξ_j dω, a quadrature self-test surface:
/// any orthonormal basis must return the identity.
pub fn basis_gram(basis: &FunctionBasis) -> ndarray::Array2<f64> {
    let b = basis.size;
    let grid = breakpoints(&[basis.quadrature_feature()]);
    let mut gram = ndarray::Array2::zeros((b, b));
    for i in 0..b {
        for j in i..b {
            let value = integrate_segmented(
                |omega| Complex64::new(basis.eval(i, omega) * basis.eval(j, omega), 0.0),
                &grid,
                QUADRATURE_TOLERANCE,
            )
            .value
            .re;
            gram[[i, j]] = value;
            gram[[j, i]] = value;
        }
    }
    gram
}

// -- serde: field names are part of the CLI config surface ------------------

#[derive(Serialize, Deserialize)]
struct WavepacketRepr {
    shape: PulseShape,
    center_frequency: f64,
    bandwidth: f64,
    #[serde(default)]
    temporal_delay: f64,
}

impl Serialize for WavepacketSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WavepacketRepr {
            shape: self.shape,
            center_frequency: self.center_frequency,
            bandwidth: self.bandwidth,
            temporal_delay: self.temporal_delay,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WavepacketSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = WavepacketRepr::deserialize(deserializer)?;
        let PulseShape::Gaussian = repr.shape;
        WavepacketSpec::gaussian(repr.center_frequency, repr.bandwidth, repr.temporal_delay)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    family: BasisFamily,
    center_frequency: f64,
    scale: f64,
    size: usize,
}

impl Serialize for FunctionBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BasisRepr {
            family: self.family,
            center_frequency: self.center_frequency,
            scale: self.scale,
            size: self.size,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionBasis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BasisRepr::deserialize(deserializer)?;
        let BasisFamily::HermiteGauss = repr.family;
        FunctionBasis::hermite_gauss(repr.center_frequency, repr.scale, repr.size)
            .map_err(serde::de::Error::custom)
    }
}
