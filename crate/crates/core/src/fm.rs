//! FM interference spectrum model.
//!
//! A single station is described by a Gaussian fitted to its measured
//! spectrum in dBm:
//!
//! ```text
//! G(f) = y0 + A * exp(-(f - fm)^2 / (2 w^2))
//! ```
//!
//! The dB-domain fit is only used for its shape. For interference
//! calculations each station is a power-normalised Gaussian of standard
//! deviation `w` carrying the station power `P_J`; the fitted floor `y0`
//! is analyser noise and carries no station power.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::{Matrix4, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FmError {
    #[error("invalid Gaussian parameters: {0}")]
    InvalidShape(String),
    #[error("invalid FM band: {0}")]
    InvalidBand(String),
    #[error("an empty band has no aggregate")]
    EmptyBand,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {MIN_FIT_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample frequencies must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("spectrum is flat; nothing to fit")]
    Degenerate,
    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize, last: RawFit },
    #[error("fit converged to an invalid shape: {0}")]
    InvalidResult(String),
}

#[derive(Debug, Error)]
pub enum SpectrumCsvError {
    #[error("spectrum CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("spectrum CSV header must be `freq_hz,psd_dbm`, found `{0}`")]
    Header(String),
    #[error("spectrum CSV line {line}: {message}")]
    Row { line: u64, message: String },
}

pub const MIN_FIT_SAMPLES: usize = 8;

/// Unvalidated fit parameters, reported when a fit fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawFit {
    pub floor_dbm: f64,
    pub amplitude_db: f64,
    pub center_hz: f64,
    pub std_dev_hz: f64,
}

/// Gaussian fit of one station's spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFitParams {
    floor_dbm: f64,
    amplitude_db: f64,
    center_hz: f64,
    std_dev_hz: f64,
    r_squared: Option<f64>,
}

impl GaussianFitParams {
    pub fn new(
        floor_dbm: f64,
        amplitude_db: f64,
        center_hz: f64,
        std_dev_hz: f64,
        r_squared: Option<f64>,
    ) -> Result<Self, FmError> {
        if !floor_dbm.is_finite() || !center_hz.is_finite() {
            return Err(FmError::InvalidShape("floor and center must be finite".into()));
        }
        if !(amplitude_db.is_finite() && amplitude_db > 0.0) {
            return Err(FmError::InvalidShape(format!("amplitude {amplitude_db} must be > 0")));
        }
        if !(std_dev_hz.is_finite() && std_dev_hz > 0.0) {
            return Err(FmError::InvalidShape(format!("std dev {std_dev_hz} Hz must be > 0")));
        }
        if let Some(r2) = r_squared {
            if !(0.0..=1.0).contains(&r2) {
                return Err(FmError::InvalidShape(format!("R^2 {r2} outside [0, 1]")));
            }
        }
        Ok(Self { floor_dbm, amplitude_db, center_hz, std_dev_hz, r_squared })
    }

    /// The measured mean spectrum of a broadcast FM station: floor
    /// -94.20817 dBm, amplitude 58.92433 dB, centre 100 MHz, standard
    /// deviation 96.97 kHz, R^2 = 0.985.
    pub fn measured_station() -> Self {
        Self {
            floor_dbm: -94.20817,
            amplitude_db: 58.92433,
            center_hz: 100e6,
            std_dev_hz: 0.09697e6,
            r_squared: Some(0.985),
        }
    }

    pub fn floor_dbm(&self) -> f64 {
        self.floor_dbm
    }

    pub fn amplitude_db(&self) -> f64 {
        self.amplitude_db
    }

    pub fn center_hz(&self) -> f64 {
        self.center_hz
    }

    pub fn std_dev_hz(&self) -> f64 {
        self.std_dev_hz
    }

    pub fn r_squared(&self) -> Option<f64> {
        self.r_squared
    }

    pub fn with_center(self, center_hz: f64) -> Result<Self, FmError> {
        Self::new(self.floor_dbm, self.amplitude_db, center_hz, self.std_dev_hz, self.r_squared)
    }

    pub fn with_std_dev(self, std_dev_hz: f64) -> Result<Self, FmError> {
        Self::new(self.floor_dbm, self.amplitude_db, self.center_hz, std_dev_hz, self.r_squared)
    }
}

fn gaussian_density(f: f64, center: f64, std_dev: f64) -> f64 {
    let z = (f - center) / std_dev;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * std_dev)
}

/// Fitted station spectrum in dBm.
pub fn station_psd_dbm(f: f64, params: &GaussianFitParams) -> f64 {
    let z = (f - params.center_hz) / params.std_dev_hz;
    params.floor_dbm + params.amplitude_db * (-0.5 * z * z).exp()
}

/// Linear station PSD in W/Hz: a unit-area Gaussian scaled to `power`.
pub fn station_psd_linear(f: f64, params: &GaussianFitParams, power: f64) -> f64 {
    power * gaussian_density(f, params.center_hz, params.std_dev_hz)
}

/// One Gaussian power lobe of a linear spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub center: f64,
    pub std_dev: f64,
    pub power: f64,
}

impl GaussianComponent {
    pub fn psd(&self, f: f64) -> f64 {
        self.power * gaussian_density(f, self.center, self.std_dev)
    }
}

/// A linear PSD made of Gaussian lobes.
pub trait GaussianMixture {
    fn components(&self) -> Vec<GaussianComponent>;

    fn psd(&self, f: f64) -> f64 {
        self.components().iter().map(|c| c.psd(f)).sum()
    }

    fn total_power(&self) -> f64 {
        self.components().iter().map(|c| c.power).sum()
    }
}

/// Equally spaced stations sharing one spectral shape and power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmBand {
    first_freq: f64,
    spacing: f64,
    station_count: usize,
    shape: GaussianFitParams,
    station_power: f64,
}

impl FmBand {
    /// The shape's own centre is ignored; station `m` (zero-based) sits at
    /// `first_freq + m * spacing`.
    pub fn new(
        first_freq: f64,
        spacing: f64,
        station_count: usize,
        shape: GaussianFitParams,
        station_power: f64,
    ) -> Result<Self, FmError> {
        if !first_freq.is_finite() {
            return Err(FmError::InvalidBand(format!("first station {first_freq} Hz")));
        }
        if station_count > 1 && !(spacing.is_finite() && spacing > 0.0) {
            return Err(FmError::InvalidBand(format!("spacing {spacing} Hz must be > 0")));
        }
        if !(station_power.is_finite() && station_power > 0.0) {
            return Err(FmError::InvalidBand(format!("station power {station_power} W")));
        }
        Ok(Self { first_freq, spacing, station_count, shape, station_power })
    }

    /// A band with no stations.
    pub fn empty() -> Self {
        Self {
            first_freq: 88e6,
            spacing: 0.5e6,
            station_count: 0,
            shape: GaussianFitParams::measured_station(),
            station_power: 1.0,
        }
    }

    pub fn first_freq(&self) -> f64 {
        self.first_freq
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn station_count(&self) -> usize {
        self.station_count
    }

    pub fn shape(&self) -> &GaussianFitParams {
        &self.shape
    }

    pub fn station_power(&self) -> f64 {
        self.station_power
    }

    pub fn with_station_power(self, station_power: f64) -> Result<Self, FmError> {
        Self::new(self.first_freq, self.spacing, self.station_count, self.shape, station_power)
    }

    pub fn with_station_count(self, station_count: usize) -> Result<Self, FmError> {
        Self::new(self.first_freq, self.spacing, station_count, self.shape, self.station_power)
    }

    /// Centre of station `m`, zero-based.
    pub fn station_center(&self, m: usize) -> f64 {
        self.first_freq + m as f64 * self.spacing
    }

    pub fn station_centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.station_count).map(|m| self.station_center(m))
    }

    /// Mid-point between the first and last station; `first_freq` when empty.
    pub fn center(&self) -> f64 {
        if self.station_count == 0 {
            return self.first_freq;
        }
        self.first_freq + (self.station_count - 1) as f64 * self.spacing / 2.0
    }

    /// Distance between the first and last station centres.
    pub fn extent(&self) -> f64 {
        self.station_count.saturating_sub(1) as f64 * self.spacing
    }

    /// Station shape re-centred on station `m`.
    pub fn station_shape(&self, m: usize) -> GaussianFitParams {
        GaussianFitParams { center_hz: self.station_center(m), ..self.shape }
    }
}

impl GaussianMixture for FmBand {
    fn components(&self) -> Vec<GaussianComponent> {
        self.station_centers()
            .map(|center| GaussianComponent {
                center,
                std_dev: self.shape.std_dev_hz,
                power: self.station_power,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandPsdMode {
    /// Sum of the stations' linear PSDs, W/Hz.
    #[default]
    Physical,
    /// Literal dB-domain sum `M*y0 + A*sum(exp(..))`, in "dBm". Only
    /// meaningful for comparison plots.
    DbSum,
}

/// PSD of the whole band at `f`.
pub fn band_psd(f: f64, band: &FmBand, mode: BandPsdMode) -> f64 {
    match mode {
        BandPsdMode::Physical => band
            .station_centers()
            .map(|c| band.station_power * gaussian_density(f, c, band.shape.std_dev_hz))
            .sum(),
        BandPsdMode::DbSum => {
            let m = band.station_count as f64;
            let w = band.shape.std_dev_hz;
            let lobes: f64 = band
                .station_centers()
                .map(|c| {
                    let z = (f - c) / w;
                    (-0.5 * z * z).exp()
                })
                .sum();
            m * band.shape.floor_dbm + band.shape.amplitude_db * lobes
        }
    }
}

/// Single-Gaussian stand-in for a whole band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateGaussian {
    pub center: f64,
    pub std_dev: f64,
    pub total_power: f64,
}

impl GaussianMixture for AggregateGaussian {
    fn components(&self) -> Vec<GaussianComponent> {
        vec![GaussianComponent {
            center: self.center,
            std_dev: self.std_dev,
            power: self.total_power,
        }]
    }
}

/// Collapses a band into one Gaussian at the mean station frequency with
/// standard deviation `M * w` and the band's total power.
pub fn aggregate_band(band: &FmBand) -> Result<AggregateGaussian, FmError> {
    if band.station_count == 0 {
        return Err(FmError::EmptyBand);
    }
    let m = band.station_count as f64;
    let center = band.station_centers().sum::<f64>() / m;
    Ok(AggregateGaussian {
        center,
        std_dev: m * band.shape.std_dev_hz,
        total_power: m * band.station_power,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Stop once the largest relative parameter step falls below this.
    pub rel_step_tol: f64,
    pub initial_lambda: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { max_iterations: 200, rel_step_tol: 1e-10, initial_lambda: 1e-3 }
    }
}

/// Least-squares fit of the station Gaussian to `(freq_hz, psd_dbm)`
/// samples, with the default [`FitConfig`].
pub fn fit_gaussian_psd(samples: &[(f64, f64)]) -> Result<GaussianFitParams, FitError> {
    fit_gaussian_psd_with(samples, &FitConfig::default())
}

/// Levenberg-Marquardt fit.
///
/// Start point: floor at the minimum sample, amplitude `max - min`, centre
/// at the peak sample and standard deviation from the half-amplitude
/// half-width divided by `sqrt(2 ln 2)`. Frequencies are internally
/// measured from the peak in units of that starting width.
pub fn fit_gaussian_psd_with(
    samples: &[(f64, f64)],
    config: &FitConfig,
) -> Result<GaussianFitParams, FitError> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    for (i, &(f, y)) in samples.iter().enumerate() {
        if !f.is_finite() || !y.is_finite() {
            return Err(FitError::NonFinite(i));
        }
        if i > 0 && f <= samples[i - 1].0 {
            return Err(FitError::NotIncreasing(i));
        }
    }

    let (peak_idx, &(peak_f, max_y)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    let min_y = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let span_y = max_y - min_y;
    if span_y <= 1e-12 * max_y.abs().max(1.0) {
        return Err(FitError::Degenerate);
    }

    let width = initial_std_dev(samples, peak_idx, min_y + 0.5 * span_y)
        .unwrap_or((samples[samples.len() - 1].0 - samples[0].0) / 4.0);
    let origin = peak_f;
    let xs: Vec<f64> = samples.iter().map(|s| (s.0 - origin) / width).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();

    // Parameters: floor, amplitude, centre and sigma in scaled units.
    let mut theta = Vector4::new(min_y, span_y, 0.0, 1.0);
    let mut cost = sum_sq_residuals(&xs, &ys, &theta);
    let mut lambda = config.initial_lambda;
    let to_raw = |t: &Vector4<f64>| RawFit {
        floor_dbm: t[0],
        amplitude_db: t[1],
        center_hz: origin + t[2] * width,
        std_dev_hz: t[3].abs() * width,
    };

    let mut converged = false;
    for _ in 0..config.max_iterations {
        let (jtj, jtr) = normal_equations(&xs, &ys, &theta);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for i in 0..4 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = theta + step;
            let candidate_cost = sum_sq_residuals(&xs, &ys, &candidate);
            if candidate_cost.is_finite() && candidate_cost <= cost {
                let rel = (0..4)
                    .map(|i| step[i].abs() / theta[i].abs().max(1.0))
                    .fold(0.0, f64::max);
                theta = candidate;
                cost = candidate_cost;
                lambda = (lambda * 0.1).max(1e-12);
                accepted = true;
                if rel < config.rel_step_tol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        // No downhill step exists at any damping: already at the minimum.
        if !accepted || converged || cost == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(FitError::NotConverged { iterations: config.max_iterations, last: to_raw(&theta) });
    }

    let raw = to_raw(&theta);
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let total: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = (1.0 - cost / total).clamp(0.0, 1.0);
    GaussianFitParams::new(
        raw.floor_dbm,
        raw.amplitude_db,
        raw.center_hz,
        raw.std_dev_hz,
        Some(r_squared),
    )
    .map_err(|e| FitError::InvalidResult(e.to_string()))
}

fn initial_std_dev(samples: &[(f64, f64)], peak: usize, half_level: f64) -> Option<f64> {
    let crossing = |i: usize, j: usize| {
        let (f0, y0) = samples[i];
        let (f1, y1) = samples[j];
        f0 + (half_level - y0) * (f1 - f0) / (y1 - y0)
    };
    let right = (peak..samples.len() - 1)
        .find(|&i| samples[i + 1].1 < half_level)
        .map(|i| crossing(i, i + 1) - samples[peak].0);
    let left = (1..=peak)
        .rev()
        .find(|&i| samples[i - 1].1 < half_level)
        .map(|i| samples[peak].0 - crossing(i - 1, i));
    let hwhm = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (l + r),
        (Some(w), None) | (None, Some(w)) => w,
        (None, None) => return None,
    };
    (hwhm > 0.0).then(|| hwhm / (2.0 * std::f64::consts::LN_2).sqrt())
}

fn model(x: f64, t: &Vector4<f64>) -> (f64, f64) {
    let z = (x - t[2]) / t[3];
    let e = (-0.5 * z * z).exp();
    (t[0] + t[1] * e, e)
}

fn sum_sq_residuals(xs: &[f64], ys: &[f64], t: &Vector4<f64>) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| (y - model(x, t).0).powi(2)).sum()
}

fn normal_equations(xs: &[f64], ys: &[f64], t: &Vector4<f64>) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let (pred, e) = model(x, t);
        let d = x - t[2];
        let s2 = t[3] * t[3];
        let grad = Vector4::new(1.0, e, t[1] * e * d / s2, t[1] * e * d * d / (s2 * t[3]));
        jtj += grad * grad.transpose();
        jtr += grad * (y - pred);
    }
    (jtj, jtr)
}

/// Reads a `freq_hz,psd_dbm` spectrum CSV (header required).
pub fn read_spectrum_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>, SpectrumCsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() != 2 || &header[0] != "freq_hz" || &header[1] != "psd_dbm" {
        return Err(SpectrumCsvError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(SpectrumCsvError::Row { line, message: "expected two columns".into() });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| SpectrumCsvError::Row {
                line,
                message: format!("`{s}`: {e}"),
            })
        };
        out.push((parse(&record[0])?, parse(&record[1])?));
    }
    Ok(out)
}

/// `points` equally spaced samples of [`station_psd_dbm`] across
/// `center ± span / 2`, each perturbed by zero-mean Gaussian noise with
/// standard deviation `noise_db`. Stands in for an analyzer trace.
pub fn synthetic_spectrum(
    params: &GaussianFitParams,
    span_hz: f64,
    points: usize,
    noise_db: f64,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_db.max(0.0)).expect("finite std dev");
    let start = params.center_hz - span_hz / 2.0;
    let step = span_hz / (points.max(2) - 1) as f64;
    (0..points)
        .map(|i| {
            let f = start + i as f64 * step;
            (f, station_psd_dbm(f, params) + noise.sample(&mut rng))
        })
        .collect()
}

pub fn write_spectrum_csv<W: Write>(writer: W, samples: &[(f64, f64)]) -> Result<(), SpectrumCsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["freq_hz", "psd_dbm"])?;
    for &(f, y) in samples {
        w.write_record([format!("{f:?}"), format!("{y:?}")])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn station() -> GaussianFitParams {
        GaussianFitParams::measured_station()
    }

    #[test]
    fn peak_and_one_sigma() {
        let p = station();
        assert!((station_psd_dbm(100e6, &p) - (-35.28384)).abs() < 1e-12);
        // 50-digit evaluation of y0 + A e^{-1/2}.
        let one_sigma = station_psd_dbm(100e6 + 0.09697e6, &p);
        assert!((one_sigma - (-58.468_757_251_975_08)).abs() < 1e-10);
        assert!((station_psd_dbm(100e6 + 10.0 * 0.09697e6, &p) - p.floor_dbm()).abs() < 1e-6);
    }

    #[test]
    fn linear_peak_value() {
        let v = station_psd_linear(100e6, &station(), 1.0);
        assert!(((v - 4.114_079_410_141_618e-6) / v).abs() < 1e-12);
        let side = station_psd_linear(100e6 + 0.09697e6, &station(), 1.0);
        assert!((side / v - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn shape_validation() {
        assert!(GaussianFitParams::new(-90.0, 0.0, 1e8, 1e5, None).is_err());
        assert!(GaussianFitParams::new(-90.0, 10.0, 1e8, 0.0, None).is_err());
        assert!(GaussianFitParams::new(-90.0, 10.0, 1e8, 1e5, Some(1.5)).is_err());
        assert!(FmBand::new(88e6, 0.0, 2, station(), 1.0).is_err());
        assert!(FmBand::new(88e6, 0.0, 1, station(), 1.0).is_ok());
        assert!(FmBand::new(88e6, 0.5e6, 2, station(), 0.0).is_err());
    }

    #[test]
    fn single_station_band_matches_station() {
        let band = FmBand::new(100e6, 0.5e6, 1, station(), 2.0).unwrap();
        for f in [99.8e6, 100e6, 100.05e6] {
            let want = station_psd_linear(f, &station(), 2.0);
            assert!((band_psd(f, &band, BandPsdMode::Physical) - want).abs() <= 1e-15 * want);
            assert!((band_psd(f, &band, BandPsdMode::DbSum) - station_psd_dbm(f, &station())).abs() < 1e-12);
        }
    }

    #[test]
    fn far_neighbour_is_negligible() {
        let band = FmBand::new(100e6, 5e6, 2, station(), 1.0).unwrap();
        let peak = station_psd_linear(100e6, &station(), 1.0);
        let v = band_psd(100e6, &band, BandPsdMode::Physical);
        assert!((v - peak) / peak < 1e-6);
    }

    #[test]
    fn aggregate_examples() {
        let band = FmBand::new(88e6, 0.5e6, 40, station(), 1.0).unwrap();
        let agg = aggregate_band(&band).unwrap();
        assert!((agg.center - 97.75e6).abs() < 1e-6);
        assert!((agg.std_dev - 3.8788e6).abs() < 1e-6);
        assert_eq!(agg.total_power, 40.0);
        let one = aggregate_band(&band.with_station_count(1).unwrap()).unwrap();
        assert_eq!(one.center, 88e6);
        assert_eq!(one.std_dev, 0.09697e6);
        assert_eq!(aggregate_band(&FmBand::empty()), Err(FmError::EmptyBand));
    }

    #[test]
    fn fit_rejects_bad_input() {
        let flat: Vec<_> = (0..20).map(|i| (f64::from(i), -90.0)).collect();
        assert_eq!(fit_gaussian_psd(&flat), Err(FitError::Degenerate));
        assert_eq!(fit_gaussian_psd(&flat[..5]), Err(FitError::TooFewSamples(5)));
        let mut unsorted = flat.clone();
        unsorted[3].0 = 1.0;
        unsorted[4].1 = -50.0;
        assert_eq!(fit_gaussian_psd(&unsorted), Err(FitError::NotIncreasing(3)));
    }

    #[test]
    fn fit_noiseless_round_trip() {
        let p = station();
        let w = p.std_dev_hz();
        let samples: Vec<_> = (0..201)
            .map(|i| {
                let f = p.center_hz() - 5.0 * w + f64::from(i) * 0.05 * w;
                (f, station_psd_dbm(f, &p))
            })
            .collect();
        let fit = fit_gaussian_psd(&samples).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(fit.floor_dbm(), p.floor_dbm()) < 1e-6);
        assert!(rel(fit.amplitude_db(), p.amplitude_db()) < 1e-6);
        assert!(rel(fit.center_hz(), p.center_hz()) < 1e-6);
        assert!(rel(fit.std_dev_hz(), p.std_dev_hz()) < 1e-6);
        assert!(fit.r_squared().unwrap() >= 0.999_999);
    }

    #[test]
    fn csv_round_trip_and_header_check() {
        let samples = vec![(1.0e8, -40.5), (1.001e8, -41.25)];
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &samples).unwrap();
        assert_eq!(read_spectrum_csv(buf.as_slice()).unwrap(), samples);
        assert!(matches!(
            read_spectrum_csv("f,p\n1,2\n".as_bytes()),
            Err(SpectrumCsvError::Header(_))
        ));
        assert!(matches!(
            read_spectrum_csv("freq_hz,psd_dbm\n1,x\n".as_bytes()),
            Err(SpectrumCsvError::Row { line: 2, .. })
        ));
    }
}
