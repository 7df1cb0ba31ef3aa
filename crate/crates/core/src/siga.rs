//! Multi-user BER with the simplified improved Gaussian approximation
//! (SIGA).
//!
//! With perfect power control the variance `psi` of the multiple-access
//! interference at the correlator has mean and variance
//!
//! ```text
//! mu    = G Tc^2 P (K-1) / 6
//! var   = (K-1) Tc^4 P^2 / 4 * [23 G^2/360 + G (1/20 + (K-2)/36) - 1/20 - (K-2)/36]
//! ```
//!
//! and the bit error probability is approximated by three erfc terms
//! evaluated at `mu`, `mu + sqrt(3) sigma` and `mu - sqrt(3) sigma`, each
//! added to the equivalent noise-plus-FM variance `I_eq`.

use crate::analytic::{
    interference_integral, BerError, BerMethod, BerPoint, BerWarning, NoiseSpec, OverlayGeometry,
};
use crate::fm::GaussianMixture;
use crate::signal::DsssParams;
use crate::special::erfc;

/// Fraction of `I_eq` that a non-positive third denominator is clamped to.
pub const CLAMP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiUserScenario {
    users: u32,
    dsss: DsssParams,
}

impl MultiUserScenario {
    /// `users` counts the desired user; every user arrives with
    /// `dsss.power()`.
    pub fn new(users: u32, dsss: DsssParams) -> Result<Self, BerError> {
        if users == 0 {
            return Err(BerError::InvalidUsers("at least one user is required".into()));
        }
        Ok(Self { users, dsss })
    }

    pub fn users(&self) -> u32 {
        self.users
    }

    pub fn dsss(&self) -> &DsssParams {
        &self.dsss
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigaMoments {
    pub mu_psi: f64,
    /// Standard deviation of `psi`.
    pub sigma_psi: f64,
}

impl SigaMoments {
    pub fn variance(&self) -> f64 {
        self.sigma_psi * self.sigma_psi
    }
}

/// Bracketed polynomial of the `psi` variance, scaled by 360 so every
/// coefficient is an integer: `23 G^2 + (G - 1)(10 K - 2)`.
fn variance_bracket_times_360(gain: u32, users: u32) -> f64 {
    let g = i128::from(gain);
    let k = i128::from(users);
    (23 * g * g + (g - 1) * (10 * k - 2)) as f64
}

pub fn siga_moments(scenario: &MultiUserScenario) -> SigaMoments {
    let dsss = &scenario.dsss;
    let others = f64::from(scenario.users - 1);
    let tc = dsss.chip_period();
    let p = dsss.power();
    let gain = dsss.processing_gain();
    let mu_psi = f64::from(gain) * tc * tc * p * others / 6.0;
    let variance = others * tc.powi(4) / 4.0 * p * p
        * variance_bracket_times_360(gain, scenario.users)
        / 360.0;
    SigaMoments { mu_psi, sigma_psi: variance.sqrt() }
}

/// Noise plus FM variance at the correlator output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentInterference {
    pub i_eq: f64,
    /// `N0 Tb / 4`.
    pub noise_part: f64,
    /// `Tb Tc J / 2`, `J` the chip-weighted FM power.
    pub fm_part: f64,
}

impl EquivalentInterference {
    pub fn from_parts(noise_part: f64, fm_part: f64) -> Self {
        Self { i_eq: noise_part + fm_part, noise_part, fm_part }
    }
}

/// `I_eq = N0 Tb / 4 + Tb Tc J / 2`, with `J` from
/// [`interference_integral`].
pub fn equivalent_interference(
    noise: &NoiseSpec,
    dsss: &DsssParams,
    spectrum: &impl GaussianMixture,
    geom: &OverlayGeometry,
) -> Result<EquivalentInterference, BerError> {
    let integral = interference_integral(dsss, spectrum, geom)?;
    let tb = dsss.bit_period();
    Ok(EquivalentInterference::from_parts(
        noise.n0() * tb / 4.0,
        0.5 * tb * dsss.chip_period() * integral,
    ))
}

/// Three-term SIGA bit error probability for received bit energy `eb`.
pub fn ber_siga(
    eb: f64,
    scenario: &MultiUserScenario,
    ieq: &EquivalentInterference,
    moments: &SigaMoments,
) -> Result<BerPoint, BerError> {
    let tb = scenario.dsss.bit_period();
    let spread = 3f64.sqrt() * moments.sigma_psi;
    let centre = moments.mu_psi + ieq.i_eq;
    if !(centre > 0.0) {
        return Err(BerError::SigaDegenerate {
            mu_psi: moments.mu_psi,
            sigma_psi: moments.sigma_psi,
            i_eq: ieq.i_eq,
        });
    }
    let mut warnings = Vec::new();
    let mut low = centre - spread;
    if low <= 0.0 {
        let reference = if ieq.i_eq > 0.0 { ieq.i_eq } else { moments.mu_psi };
        low = reference * CLAMP_FRACTION;
        warnings.push(BerWarning::SigaClamped);
    }
    let term = |denominator: f64| erfc((eb * tb / (4.0 * denominator)).sqrt());
    let pe = term(centre) / 3.0 + term(centre + spread) / 12.0 + term(low) / 12.0;
    let eb_n0 = if ieq.noise_part > 0.0 { eb * tb / (4.0 * ieq.noise_part) } else { f64::INFINITY };
    Ok(BerPoint { eb_n0, pe: pe.min(0.5), method: BerMethod::Siga, warnings })
}

/// Convenience wrapper: moments, `I_eq` and BER for one operating point.
pub fn ber_multi_user(
    scenario: &MultiUserScenario,
    noise: &NoiseSpec,
    spectrum: &impl GaussianMixture,
    geom: &OverlayGeometry,
) -> Result<BerPoint, BerError> {
    let dsss = scenario.dsss();
    let ieq = equivalent_interference(noise, dsss, spectrum, geom)?;
    let mut point = ber_siga(dsss.bit_energy(), scenario, &ieq, &siga_moments(scenario))?;
    if geom.exceeds_main_lobe(dsss) {
        point.warnings.insert(0, BerWarning::WideInterference);
    }
    Ok(point)
}
