//! Complex-baseband Monte Carlo simulation of the DSSS correlator receiver
//! with synthesized FM interferers and AWGN.
//!
//! Baseband is taken relative to the SS carrier with the power convention
//! `mean |x|^2 = passband power`. The SS signal is `sqrt(P) b c(t)` on the
//! in-phase rail, each FM station is a constant-envelope phasor of power
//! `P_J`, and the noise has density `N0/2` per rail. The receiver
//! correlates the in-phase rail with the synchronised code over each bit
//! and decides by sign.
//!
//! Work is split into fixed-size batches of bits. Batch `k` draws its
//! randomness from ChaCha8 stream `k` of the run seed, so the merged
//! estimate does not depend on how batches are scheduled across threads.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{NoiseSpec, OverlayGeometry};
use crate::fm::FmBand;
use crate::signal::{DataBits, DsssParams, PnSequence};

/// Stopping needs at least this many observed errors.
pub const MIN_ERRORS: u64 = 10;

/// Sinusoids summed to build one station's message.
pub const MESSAGE_TONES: usize = 32;

/// Default run seed.
pub const DEFAULT_SEED: u64 = 0x5EED_F00D_2024;

const STATION_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error(
        "interferer at baseband offset {offset} Hz with deviation {deviation} Hz \
         does not fit a sample rate of {sample_rate} Hz"
    )]
    SampleRate { offset: f64, deviation: f64, sample_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub samples_per_chip: usize,
    /// Stop once `(1 - p) / (n p)` falls to this value.
    pub target_rel_variance: f64,
    pub max_bits: u64,
    pub seed: u64,
    /// Bandwidth of the Gaussian message driving each FM station, Hz.
    pub fm_message_cutoff: f64,
    /// Bits per independently seeded batch.
    pub batch_bits: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            samples_per_chip: 8,
            target_rel_variance: 0.01,
            max_bits: 10_000_000,
            seed: DEFAULT_SEED,
            fm_message_cutoff: 15e3,
            batch_bits: 512,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.samples_per_chip < 4 {
            return Err(SimError::Config(format!(
                "samples_per_chip {} must be >= 4",
                self.samples_per_chip
            )));
        }
        if !(self.target_rel_variance > 0.0 && self.target_rel_variance <= 1.0) {
            return Err(SimError::Config(format!(
                "target_rel_variance {} must be in (0, 1]",
                self.target_rel_variance
            )));
        }
        if self.max_bits < 1 || self.batch_bits < 1 {
            return Err(SimError::Config("max_bits and batch_bits must be >= 1".into()));
        }
        if !(self.fm_message_cutoff.is_finite() && self.fm_message_cutoff > 0.0) {
            return Err(SimError::Config(format!(
                "fm_message_cutoff {} Hz must be > 0",
                self.fm_message_cutoff
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Stop,
}

/// Relative variance `(1 - p) / (n p)` of the error-rate estimate;
/// infinite before the first error.
pub fn relative_variance(errors: u64, bits: u64) -> f64 {
    if errors == 0 || bits == 0 {
        return f64::INFINITY;
    }
    let p = errors as f64 / bits as f64;
    (1.0 - p) / (bits as f64 * p)
}

pub fn stopping_rule(errors: u64, bits: u64, target: f64) -> StopDecision {
    if errors >= MIN_ERRORS && relative_variance(errors, bits) <= target {
        StopDecision::Stop
    } else {
        StopDecision::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub pe_hat: f64,
    pub errors: u64,
    pub bits: u64,
    pub rel_variance: f64,
    pub converged: bool,
    pub seed: u64,
}

impl BerEstimate {
    fn from_counts(errors: u64, bits: u64, converged: bool, seed: u64) -> Self {
        Self {
            pe_hat: if bits == 0 { 0.0 } else { errors as f64 / bits as f64 },
            errors,
            bits,
            rel_variance: relative_variance(errors, bits),
            converged,
            seed,
        }
    }

    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub fn std_error(&self) -> f64 {
        (self.pe_hat * (1.0 - self.pe_hat) / self.bits as f64).sqrt()
    }

    /// Normal-approximation 95% interval.
    pub fn confidence_interval_95(&self) -> (f64, f64) {
        let half = 1.959_963_984_540_054 * self.std_error();
        ((self.pe_hat - half).max(0.0), self.pe_hat + half)
    }
}

/// Constant-envelope FM station at a baseband offset.
///
/// The message is a sum of [`MESSAGE_TONES`] unit-variance sinusoids on a
/// jittered uniform grid below the cutoff, so it is close to Gaussian and
/// its phase integral is available in closed form. Scaling the frequency
/// deviation to an RMS of `std_dev` makes the long-run spectrum Gaussian
/// with that standard deviation when `std_dev` is much larger than the
/// cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FmInterferer {
    baseband_offset: f64,
    std_dev: f64,
    amplitude: f64,
    phase: f64,
    tone_freqs: Vec<f64>,
    tone_phases: Vec<f64>,
}

impl FmInterferer {
    pub fn new<R: Rng>(
        baseband_offset: f64,
        std_dev: f64,
        power: f64,
        message_cutoff: f64,
        rng: &mut R,
    ) -> Self {
        let phase = rng.random::<f64>() * TAU;
        let n = MESSAGE_TONES as f64;
        let tone_freqs = (0..MESSAGE_TONES)
            .map(|k| message_cutoff * (k as f64 + 0.25 + 0.5 * rng.random::<f64>()) / n)
            .collect();
        let tone_phases = (0..MESSAGE_TONES).map(|_| rng.random::<f64>() * TAU).collect();
        Self {
            baseband_offset,
            std_dev,
            amplitude: power.sqrt(),
            phase,
            tone_freqs,
            tone_phases,
        }
    }

    pub fn baseband_offset(&self) -> f64 {
        self.baseband_offset
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn power(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    fn check_rate(&self, sample_rate: f64) -> Result<(), SimError> {
        if sample_rate > 2.0 * (self.baseband_offset.abs() + 6.0 * self.std_dev) {
            Ok(())
        } else {
            Err(SimError::SampleRate {
                offset: self.baseband_offset,
                deviation: self.std_dev,
                sample_rate,
            })
        }
    }

    /// Message-driven phase at time `t`, zero at `t = 0`.
    pub fn message_phase(&self, t: f64) -> f64 {
        let a = (2.0 / MESSAGE_TONES as f64).sqrt() * self.std_dev;
        self.tone_freqs
            .iter()
            .zip(&self.tone_phases)
            .map(|(&f, &th)| a / f * ((TAU * f * t + th).sin() - th.sin()))
            .sum()
    }

    /// Total phase at `t`, carrier offset included, reduced modulo 2π.
    fn total_phase(&self, t: f64, message: f64) -> f64 {
        TAU * (self.baseband_offset * t).fract() + message + self.phase
    }

    /// Adds `intervals * samples_per_interval` samples starting at `t0` to
    /// `out`. The message phase is evaluated exactly every `step` seconds
    /// and linearly interpolated in between.
    fn accumulate(
        &self,
        t0: f64,
        step: f64,
        intervals: usize,
        samples_per_interval: usize,
        out: &mut [Complex64],
        grid: &mut Vec<f64>,
    ) {
        grid.clear();
        grid.resize(intervals + 1, 0.0);
        let a = (2.0 / MESSAGE_TONES as f64).sqrt() * self.std_dev;
        for (&f, &th) in self.tone_freqs.iter().zip(&self.tone_phases) {
            let c = a / f;
            let mut z = Complex64::cis(TAU * (f * t0).fract() + th);
            let rot = Complex64::cis(TAU * f * step);
            let base = th.sin();
            for g in grid.iter_mut() {
                *g += c * (z.im - base);
                z *= rot;
            }
        }
        let mut start = Complex64::from_polar(self.amplitude, self.total_phase(t0, grid[0]));
        for j in 0..intervals {
            let t_next = t0 + (j + 1) as f64 * step;
            let next = Complex64::from_polar(self.amplitude, self.total_phase(t_next, grid[j + 1]));
            let delta = TAU * self.baseband_offset * step + (grid[j + 1] - grid[j]);
            let rot = Complex64::cis(delta / samples_per_interval as f64);
            let mut x = start;
            for s in &mut out[j * samples_per_interval..(j + 1) * samples_per_interval] {
                *s += x;
                x *= rot;
            }
            start = next;
        }
    }
}

/// `n_samples` of the interferer alone, starting at `t = 0`.
pub fn synthesize_fm_interferer(
    state: &FmInterferer,
    n_samples: usize,
    sample_rate: f64,
) -> Result<Vec<Complex64>, SimError> {
    state.check_rate(sample_rate)?;
    // Exact message phase every 8 samples.
    const SUB: usize = 8;
    let intervals = n_samples.div_ceil(SUB);
    let step = SUB as f64 / sample_rate;
    let mut out = vec![Complex64::new(0.0, 0.0); intervals * SUB];
    let mut grid = Vec::new();
    // Blocks keep the phasor recursion short.
    const BLOCK: usize = 4096;
    for b in (0..intervals).step_by(BLOCK) {
        let n = BLOCK.min(intervals - b);
        state.accumulate(
            b as f64 * step,
            step,
            n,
            SUB,
            &mut out[b * SUB..(b + n) * SUB],
            &mut grid,
        );
    }
    out.truncate(n_samples);
    Ok(out)
}

/// One operating point for the waveform simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub dsss: DsssParams,
    pub noise: NoiseSpec,
    pub band: FmBand,
    pub geom: OverlayGeometry,
}

impl LinkSpec {
    /// Stations whose centre falls inside the interference window reach
    /// the receiver; the rest are removed by the front-end filter.
    pub fn received_station_centers(&self) -> Vec<f64> {
        let (lo, hi) = self.geom.window();
        self.band.station_centers().filter(|c| (lo..=hi).contains(c)).collect()
    }
}

/// Samples of the SS transmitter output for the given bits and long code.
pub fn ss_waveform(
    dsss: &DsssParams,
    bits: &DataBits,
    pn: &PnSequence,
    samples_per_chip: usize,
) -> Result<Vec<Complex64>, crate::signal::SignalError> {
    let chips = crate::signal::spread(bits, pn, dsss, crate::signal::CodeMode::Long)?;
    let amp = dsss.power().sqrt();
    Ok(chips
        .iter()
        .flat_map(|&c| std::iter::repeat_n(Complex64::new(amp * f64::from(c), 0.0), samples_per_chip))
        .collect())
}

struct LinkRenderer {
    gain: usize,
    samples_per_chip: usize,
    chip_period: f64,
    bit_period: f64,
    amplitude: f64,
    noise_sigma: f64,
    interferers: Vec<FmInterferer>,
}

struct BitScratch {
    chips: Vec<i8>,
    rx: Vec<Complex64>,
    grid: Vec<f64>,
}

impl LinkRenderer {
    fn new(link: &LinkSpec, sim: &SimConfig) -> Result<Self, SimError> {
        sim.validate()?;
        let dsss = &link.dsss;
        let sample_rate = sim.samples_per_chip as f64 * dsss.chip_rate();
        let carrier = dsss.carrier_freq();
        let interferers = link
            .received_station_centers()
            .into_iter()
            .enumerate()
            .map(|(m, center)| {
                let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
                rng.set_stream(STATION_STREAM_BASE + m as u64);
                let fm = FmInterferer::new(
                    center - carrier,
                    link.band.shape().std_dev_hz(),
                    link.band.station_power(),
                    sim.fm_message_cutoff,
                    &mut rng,
                );
                fm.check_rate(sample_rate).map(|_| fm)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            gain: dsss.processing_gain() as usize,
            samples_per_chip: sim.samples_per_chip,
            chip_period: dsss.chip_period(),
            bit_period: dsss.bit_period(),
            amplitude: dsss.power().sqrt(),
            noise_sigma: (0.5 * link.noise.n0() * sample_rate).sqrt(),
            interferers,
        })
    }

    fn scratch(&self) -> BitScratch {
        BitScratch {
            chips: vec![0; self.gain],
            rx: vec![Complex64::new(0.0, 0.0); self.gain * self.samples_per_chip],
            grid: Vec::with_capacity(self.gain + 1),
        }
    }

    /// Draws bit `index`, fills `scratch.rx` with the received samples and
    /// returns the transmitted bit.
    fn render_bit(&self, index: u64, rng: &mut ChaCha8Rng, scratch: &mut BitScratch) -> i8 {
        let bit: i8 = if rng.random::<bool>() { 1 } else { -1 };
        for c in scratch.chips.iter_mut() {
            *c = if rng.random::<bool>() { 1 } else { -1 };
        }
        scratch.rx.fill(Complex64::new(0.0, 0.0));
        let t0 = index as f64 * self.bit_period;
        for fm in &self.interferers {
            fm.accumulate(
                t0,
                self.chip_period,
                self.gain,
                self.samples_per_chip,
                &mut scratch.rx,
                &mut scratch.grid,
            );
        }
        let spc = self.samples_per_chip;
        for (n, &c) in scratch.chips.iter().enumerate() {
            let s = self.amplitude * f64::from(bit * c);
            for x in &mut scratch.rx[n * spc..(n + 1) * spc] {
                x.re += s;
            }
        }
        if self.noise_sigma > 0.0 {
            for x in scratch.rx.iter_mut() {
                let i: f64 = rng.sample(StandardNormal);
                let q: f64 = rng.sample(StandardNormal);
                *x += Complex64::new(self.noise_sigma * i, self.noise_sigma * q);
            }
        }
        bit
    }

    /// In-phase correlation against the chips, one sum per bit.
    fn correlate(&self, scratch: &BitScratch) -> f64 {
        let spc = self.samples_per_chip;
        scratch
            .chips
            .iter()
            .enumerate()
            .map(|(n, &c)| {
                let chip: f64 = scratch.rx[n * spc..(n + 1) * spc].iter().map(|x| x.re).sum();
                chip * f64::from(c)
            })
            .sum()
    }

    fn run_batch(&self, seed: u64, batch: u64, first_bit: u64, bits: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let mut scratch = self.scratch();
        let mut errors = 0;
        for i in 0..bits {
            let sent = self.render_bit(first_bit + i, &mut rng, &mut scratch);
            let z = self.correlate(&scratch);
            let decided = if z >= 0.0 { 1 } else { -1 };
            if decided != sent {
                errors += 1;
            }
        }
        errors
    }
}

/// Simulates the link until the stopping rule is met or `max_bits` bits
/// have been sent. Batches run on the current rayon pool.
pub fn run_link(link: &LinkSpec, sim: &SimConfig) -> Result<BerEstimate, SimError> {
    let renderer = LinkRenderer::new(link, sim)?;
    let wave = (rayon::current_num_threads() as u64 * 2).max(1);
    let total_batches = sim.max_bits.div_ceil(sim.batch_bits);
    let (mut errors, mut bits) = (0u64, 0u64);
    let mut next = 0u64;
    while next < total_batches {
        let batches: Vec<u64> = (next..(next + wave).min(total_batches)).collect();
        let counts: Vec<(u64, u64)> = batches
            .par_iter()
            .map(|&b| {
                let first = b * sim.batch_bits;
                let n = sim.batch_bits.min(sim.max_bits - first);
                (renderer.run_batch(sim.seed, b, first, n), n)
            })
            .collect();
        for (e, n) in counts {
            errors += e;
            bits += n;
            if stopping_rule(errors, bits, sim.target_rel_variance) == StopDecision::Stop {
                return Ok(BerEstimate::from_counts(errors, bits, true, sim.seed));
            }
        }
        next += wave;
    }
    Ok(BerEstimate::from_counts(errors, bits, false, sim.seed))
}

/// Received baseband samples for bits `first_bit .. first_bit + n_bits`,
/// drawn from batch stream 0 of the run seed. Intended for inspection.
pub fn render_received(
    link: &LinkSpec,
    sim: &SimConfig,
    first_bit: u64,
    n_bits: u64,
) -> Result<Vec<Complex64>, SimError> {
    let renderer = LinkRenderer::new(link, sim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    let mut scratch = renderer.scratch();
    let mut out = Vec::with_capacity(n_bits as usize * scratch.rx.len());
    for i in 0..n_bits {
        renderer.render_bit(first_bit + i, &mut rng, &mut scratch);
        out.extend_from_slice(&scratch.rx);
    }
    Ok(out)
}

/// Writes samples as interleaved little-endian `f64` pairs `(I, Q)`.
pub fn write_iq_f64le<W: Write>(mut writer: W, samples: &[Complex64]) -> io::Result<()> {
    for s in samples {
        writer.write_all(&s.re.to_le_bytes())?;
        writer.write_all(&s.im.to_le_bytes())?;
    }
    writer.flush()
}

/// Inverse of [`write_iq_f64le`].
pub fn read_iq_f64le(bytes: &[u8]) -> io::Result<Vec<Complex64>> {
    if !bytes.len().is_multiple_of(16) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "length is not a multiple of 16"));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}
