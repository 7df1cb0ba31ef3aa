//! Closed-form single-user BER of a DSSS link under FM interference and
//! AWGN.
//!
//! The correlator sees thermal noise with per-chip variance `N0*Tc/4` and
//! FM interference whose per-chip variance is `Tc^2/2` times the band PSD
//! weighted by the chip spectrum `sinc^2((f - fo) Tc)`. Folding both into
//! an equivalent noise density gives
//!
//! ```text
//! Pe = 0.5 * erfc( sqrt( Eb / (N0 + 2 Tc J) ) ),   J = ∫ S(f) sinc²((f - fo) Tc) df
//! ```
//!
//! which reduces to ideal BPSK when `J = 0`.

use std::fmt;

use thiserror::Error;

use crate::fm::GaussianMixture;
use crate::quadrature::{integrate, Integral, QuadratureConfig, QuadratureError};
use crate::signal::DsssParams;
use crate::special::{erfc, sinc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BerError {
    #[error("invalid noise density {0}")]
    InvalidNoise(f64),
    #[error("invalid overlay geometry: {0}")]
    InvalidGeometry(String),
    #[error("interference integral: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("no noise and no interference: the error probability is undefined")]
    Undefined,
    #[error("invalid multi-user scenario: {0}")]
    InvalidUsers(String),
    #[error("every SIGA denominator is non-positive (mu={mu_psi:e}, sigma={sigma_psi:e}, i_eq={i_eq:e})")]
    SigaDegenerate { mu_psi: f64, sigma_psi: f64, i_eq: f64 },
}

/// White noise with one-sided density `N0` (two-sided `N0/2`), W/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    n0: f64,
}

impl NoiseSpec {
    pub fn new(n0: f64) -> Result<Self, BerError> {
        if !(n0.is_finite() && n0 >= 0.0) {
            return Err(BerError::InvalidNoise(n0));
        }
        Ok(Self { n0 })
    }

    pub fn noiseless() -> Self {
        Self { n0: 0.0 }
    }

    /// Noise density giving the requested linear `Eb/N0` for `dsss`.
    /// An infinite ratio means no noise.
    pub fn for_eb_n0(dsss: &DsssParams, eb_n0: f64) -> Result<Self, BerError> {
        if !(eb_n0 > 0.0) {
            return Err(BerError::InvalidNoise(eb_n0));
        }
        Self::new(dsss.bit_energy() / eb_n0)
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// `Eb/N0` for `dsss`; infinite when noiseless.
    pub fn eb_n0(&self, dsss: &DsssParams) -> f64 {
        dsss.bit_energy() / self.n0
    }
}

/// Where the SS carrier sits relative to the FM band and which part of the
/// band reaches the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayGeometry {
    offset: f64,
    interference_bandwidth: f64,
    interference_center: f64,
}

impl OverlayGeometry {
    /// `offset` is SS carrier minus `interference_center`, all in Hz.
    pub fn new(
        offset: f64,
        interference_bandwidth: f64,
        interference_center: f64,
    ) -> Result<Self, BerError> {
        if !(interference_bandwidth.is_finite() && interference_bandwidth > 0.0) {
            return Err(BerError::InvalidGeometry(format!(
                "interference bandwidth {interference_bandwidth} Hz must be > 0"
            )));
        }
        if !offset.is_finite() || !interference_center.is_finite() {
            return Err(BerError::InvalidGeometry("offset and centre must be finite".into()));
        }
        Ok(Self { offset, interference_bandwidth, interference_center })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn interference_bandwidth(&self) -> f64 {
        self.interference_bandwidth
    }

    pub fn interference_center(&self) -> f64 {
        self.interference_center
    }

    /// Absolute SS carrier frequency implied by the offset.
    pub fn carrier(&self) -> f64 {
        self.interference_center + self.offset
    }

    pub fn window(&self) -> (f64, f64) {
        let half = 0.5 * self.interference_bandwidth;
        (self.interference_center - half, self.interference_center + half)
    }

    /// The model assumes the interference fits in the SS main lobe,
    /// `W_i <= 2 / Tc`.
    pub fn exceeds_main_lobe(&self, dsss: &DsssParams) -> bool {
        self.interference_bandwidth > 2.0 * dsss.chip_rate() * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BerMethod {
    Analytic,
    Siga,
    MonteCarlo,
    IdealBpsk,
}

impl BerMethod {
    pub fn label(self) -> &'static str {
        match self {
            BerMethod::Analytic => "analytic",
            BerMethod::Siga => "siga",
            BerMethod::MonteCarlo => "monte-carlo",
            BerMethod::IdealBpsk => "ideal-bpsk",
        }
    }
}

impl fmt::Display for BerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Non-fatal conditions attached to a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BerWarning {
    /// Interference bandwidth wider than the SS main lobe `2 / Tc`.
    WideInterference,
    /// The third SIGA denominator was clamped.
    SigaClamped,
}

impl BerWarning {
    pub fn label(self) -> &'static str {
        match self {
            BerWarning::WideInterference => "interference-wider-than-main-lobe",
            BerWarning::SigaClamped => "siga-denominator-clamped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    /// Linear `Eb/N0`, infinite when noiseless.
    pub eb_n0: f64,
    pub pe: f64,
    pub method: BerMethod,
    pub warnings: Vec<BerWarning>,
}

/// Per-chip thermal-noise variance at the correlator, `N0 Tc / 4`.
pub fn noise_term_variance(noise: &NoiseSpec, chip_period: f64) -> f64 {
    noise.n0 * chip_period / 4.0
}

/// Distance beyond which a Gaussian lobe underflows to zero in f64.
const LOBE_SPAN: f64 = 40.0;
const MAX_NULL_BREAKS: usize = 4096;

/// `∫ S(f) sinc²((f - fo) Tc) df` over the interference window, in watts.
pub fn interference_integral(
    dsss: &DsssParams,
    spectrum: &impl GaussianMixture,
    geom: &OverlayGeometry,
) -> Result<f64, BerError> {
    Ok(interference_integral_with(dsss, spectrum, geom, &QuadratureConfig::default())?.value)
}

/// [`interference_integral`] with explicit quadrature settings.
///
/// Each Gaussian lobe is integrated on its own over the part of the window
/// within 40 standard deviations of its centre, with panel breaks at the
/// centre, at ±6 standard deviations and at the chip-spectrum nulls.
pub fn interference_integral_with(
    dsss: &DsssParams,
    spectrum: &impl GaussianMixture,
    geom: &OverlayGeometry,
    config: &QuadratureConfig,
) -> Result<Integral, BerError> {
    let carrier = dsss.carrier_freq();
    let tc = dsss.chip_period();
    let (win_lo, win_hi) = geom.window();
    let mut total = Integral { value: 0.0, abs_error: 0.0, panels: 0 };
    for lobe in spectrum.components() {
        let lo = win_lo.max(lobe.center - LOBE_SPAN * lobe.std_dev);
        let hi = win_hi.min(lobe.center + LOBE_SPAN * lobe.std_dev);
        if hi <= lo {
            continue;
        }
        let mut breaks = vec![lo, hi];
        for k in [-6.0, 0.0, 6.0] {
            breaks.push(lobe.center + k * lobe.std_dev);
        }
        let first_null = ((lo - carrier) * dsss.chip_rate()).ceil() as i64;
        let last_null = ((hi - carrier) * dsss.chip_rate()).floor() as i64;
        if last_null >= first_null && ((last_null - first_null) as usize) < MAX_NULL_BREAKS {
            breaks.extend((first_null..=last_null).map(|k| carrier + k as f64 * tc));
        }
        breaks.retain(|&b| b >= lo && b <= hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let part = integrate(
            |f| {
                let w = sinc((f - carrier) * tc);
                lobe.psd(f) * w * w
            },
            &breaks,
            config,
        )?;
        total.value += part.value;
        total.abs_error += part.abs_error;
        total.panels += part.panels;
    }
    Ok(total)
}

/// Equivalent noise density `N0 + 2 Tc J` seen by the decision device.
pub fn equivalent_noise_density(dsss: &DsssParams, noise: &NoiseSpec, integral: f64) -> f64 {
    noise.n0 + 2.0 * dsss.chip_period() * integral
}

/// Decision SNR `E[Z]^2 / var(Z) = 2 Eb / (N0 + 2 Tc J)`.
pub fn output_snr(dsss: &DsssParams, noise: &NoiseSpec, integral: f64) -> f64 {
    2.0 * dsss.bit_energy() / equivalent_noise_density(dsss, noise, integral)
}

/// BER for a given interference integral `J` (watts).
pub fn ber_from_integral(
    dsss: &DsssParams,
    noise: &NoiseSpec,
    integral: f64,
) -> Result<f64, BerError> {
    let density = equivalent_noise_density(dsss, noise, integral);
    if !(density > 0.0) {
        return Err(BerError::Undefined);
    }
    Ok(0.5 * erfc((dsss.bit_energy() / density).sqrt()))
}

/// Single-user BER with FM interference from `spectrum` and noise `noise`.
pub fn ber_single_user(
    dsss: &DsssParams,
    noise: &NoiseSpec,
    spectrum: &impl GaussianMixture,
    geom: &OverlayGeometry,
) -> Result<BerPoint, BerError> {
    let integral = interference_integral(dsss, spectrum, geom)?;
    let pe = ber_from_integral(dsss, noise, integral)?;
    let mut warnings = Vec::new();
    if geom.exceeds_main_lobe(dsss) {
        warnings.push(BerWarning::WideInterference);
    }
    Ok(BerPoint { eb_n0: noise.eb_n0(dsss), pe, method: BerMethod::Analytic, warnings })
}
