//! Signal-model primitives: system parameters, PN codes, spreading.
//!
//! Chips and data bits are antipodal (`+1`/`-1`). Binary LFSR output is
//! mapped `0 -> +1`, `1 -> -1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("invalid DSSS parameter: {0}")]
    InvalidParams(String),
    #[error("LFSR register length {0} outside 2..=32")]
    RegisterLength(u32),
    #[error("LFSR tap {tap} outside 1..={register_length}")]
    TapOutOfRange { tap: u32, register_length: u32 },
    #[error("LFSR initial state must be nonzero")]
    ZeroState,
    #[error("taps do not generate a maximal sequence: period {period}, expected {expected}")]
    NonMaximal { period: u64, expected: u64 },
    #[error("sequence length must be at least 1")]
    EmptySequence,
    #[error("value {0} is not an antipodal chip/bit (+1 or -1)")]
    NotAntipodal(i8),
    #[error("PN code has {available} chips, spreading needs {needed}")]
    InsufficientChips { available: usize, needed: usize },
    #[error("chip stream length {len} is not a multiple of the processing gain {gain}")]
    RaggedChips { len: usize, gain: u32 },
}

/// Parameters of the spread-spectrum transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsssParams {
    chip_rate: f64,
    processing_gain: u32,
    power: f64,
    carrier_freq: f64,
}

impl DsssParams {
    /// `chip_rate` and `carrier_freq` in Hz, `power` in watts.
    pub fn new(
        chip_rate: f64,
        processing_gain: u32,
        power: f64,
        carrier_freq: f64,
    ) -> Result<Self, SignalError> {
        if !(chip_rate.is_finite() && chip_rate > 0.0) {
            return Err(SignalError::InvalidParams(format!("chip rate {chip_rate} Hz")));
        }
        if processing_gain < 1 {
            return Err(SignalError::InvalidParams("processing gain must be >= 1".into()));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(SignalError::InvalidParams(format!("power {power} W")));
        }
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(SignalError::InvalidParams(format!("carrier {carrier_freq} Hz")));
        }
        Ok(Self { chip_rate, processing_gain, power, carrier_freq })
    }

    pub fn chip_rate(&self) -> f64 {
        self.chip_rate
    }

    pub fn processing_gain(&self) -> u32 {
        self.processing_gain
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    /// Chip duration `1 / chip_rate`.
    pub fn chip_period(&self) -> f64 {
        1.0 / self.chip_rate
    }

    /// Bit duration, `processing_gain` chip periods.
    pub fn bit_period(&self) -> f64 {
        f64::from(self.processing_gain) * self.chip_period()
    }

    /// Received energy per bit, `power * bit_period`.
    pub fn bit_energy(&self) -> f64 {
        self.power * self.bit_period()
    }

    pub fn with_power(self, power: f64) -> Result<Self, SignalError> {
        Self::new(self.chip_rate, self.processing_gain, power, self.carrier_freq)
    }

    pub fn with_carrier(self, carrier_freq: f64) -> Result<Self, SignalError> {
        Self::new(self.chip_rate, self.processing_gain, self.power, carrier_freq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnKind {
    MSequence { register_length: u32 },
    RandomBinary,
}

/// A block of antipodal spreading chips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnSequence {
    chips: Vec<i8>,
    kind: PnKind,
}

impl PnSequence {
    /// Wraps caller-supplied chips, which must all be `+1` or `-1`.
    pub fn from_chips(chips: Vec<i8>) -> Result<Self, SignalError> {
        if chips.is_empty() {
            return Err(SignalError::EmptySequence);
        }
        if let Some(&bad) = chips.iter().find(|&&c| c != 1 && c != -1) {
            return Err(SignalError::NotAntipodal(bad));
        }
        Ok(Self { chips, kind: PnKind::RandomBinary })
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn kind(&self) -> PnKind {
        self.kind
    }

    /// Number of chips held; for an m-sequence this is one full period.
    pub fn period(&self) -> usize {
        self.chips.len()
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Unnormalised periodic autocorrelation at `lag`.
    pub fn periodic_autocorrelation(&self, lag: usize) -> i64 {
        let n = self.chips.len();
        (0..n)
            .map(|i| i64::from(self.chips[i]) * i64::from(self.chips[(i + lag) % n]))
            .sum()
    }

    pub fn chip_sum(&self) -> i64 {
        self.chips.iter().map(|&c| i64::from(c)).sum()
    }
}

/// Antipodal data bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataBits(Vec<i8>);

impl DataBits {
    pub fn new(bits: Vec<i8>) -> Result<Self, SignalError> {
        if let Some(&bad) = bits.iter().find(|&&b| b != 1 && b != -1) {
            return Err(SignalError::NotAntipodal(bad));
        }
        Ok(Self(bits))
    }

    pub fn random(count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self((0..count).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How a data bit draws its chips from the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodeMode {
    /// Bit `k` uses chips `k*G_p .. (k+1)*G_p` of a non-repeating code.
    #[default]
    Long,
    /// Every bit uses the first `G_p` chips.
    Short,
}

/// One period of a maximal-length sequence from a Fibonacci LFSR.
///
/// Stages are numbered `1..=register_length` starting at the input stage.
/// Each clock outputs the last stage, shifts every stage one place towards
/// the output and loads the XOR of the tapped stages into stage 1. Bit
/// `i` of `initial_state` holds stage `i + 1`.
pub fn generate_m_sequence(
    register_length: u32,
    feedback_taps: &[u32],
    initial_state: u64,
) -> Result<PnSequence, SignalError> {
    if !(2..=32).contains(&register_length) {
        return Err(SignalError::RegisterLength(register_length));
    }
    if let Some(&tap) = feedback_taps.iter().find(|&&t| t == 0 || t > register_length) {
        return Err(SignalError::TapOutOfRange { tap, register_length });
    }
    let mask = (1u64 << register_length) - 1;
    let start = initial_state & mask;
    if start == 0 {
        return Err(SignalError::ZeroState);
    }
    let tap_mask = feedback_taps.iter().fold(0u64, |m, &t| m | (1 << (t - 1)));
    let expected = mask;
    let out_bit = register_length - 1;

    let mut state = start;
    let mut chips = Vec::with_capacity(expected as usize);
    for step in 1..=expected {
        chips.push(if (state >> out_bit) & 1 == 0 { 1 } else { -1 });
        let feedback = u64::from((state & tap_mask).count_ones() & 1);
        state = ((state << 1) | feedback) & mask;
        if state == start && step < expected {
            return Err(SignalError::NonMaximal { period: step, expected });
        }
    }
    if state != start {
        // The register fell into a cycle that excludes the start state.
        return Err(SignalError::NonMaximal { period: 0, expected });
    }
    Ok(PnSequence { chips, kind: PnKind::MSequence { register_length } })
}

/// I.i.d. equiprobable chips from a seeded ChaCha8 stream.
pub fn generate_random_sequence(length: usize, seed: u64) -> Result<PnSequence, SignalError> {
    if length == 0 {
        return Err(SignalError::EmptySequence);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chips = (0..length).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    Ok(PnSequence { chips, kind: PnKind::RandomBinary })
}

fn chips_for_bit(pn: &PnSequence, bit: usize, gain: usize, mode: CodeMode) -> &[i8] {
    match mode {
        CodeMode::Long => &pn.chips[bit * gain..(bit + 1) * gain],
        CodeMode::Short => &pn.chips[..gain],
    }
}

fn check_code_length(
    bits: usize,
    pn: &PnSequence,
    gain: usize,
    mode: CodeMode,
) -> Result<(), SignalError> {
    let needed = match mode {
        CodeMode::Long => bits * gain,
        CodeMode::Short => gain,
    };
    if pn.len() < needed {
        return Err(SignalError::InsufficientChips { available: pn.len(), needed });
    }
    Ok(())
}

/// Multiplies each data bit onto `G_p` code chips.
pub fn spread(
    bits: &DataBits,
    pn: &PnSequence,
    params: &DsssParams,
    mode: CodeMode,
) -> Result<Vec<i8>, SignalError> {
    let gain = params.processing_gain() as usize;
    check_code_length(bits.len(), pn, gain, mode)?;
    let mut out = Vec::with_capacity(bits.len() * gain);
    for (k, &b) in bits.as_slice().iter().enumerate() {
        out.extend(chips_for_bit(pn, k, gain, mode).iter().map(|&c| b * c));
    }
    Ok(out)
}

/// Correlates a chip-rate stream against the code, one sum per bit.
pub fn despread(
    chips: &[f64],
    pn: &PnSequence,
    params: &DsssParams,
    mode: CodeMode,
) -> Result<Vec<f64>, SignalError> {
    let gain = params.processing_gain() as usize;
    if !chips.len().is_multiple_of(gain) {
        return Err(SignalError::RaggedChips { len: chips.len(), gain: params.processing_gain() });
    }
    let bits = chips.len() / gain;
    check_code_length(bits, pn, gain, mode)?;
    Ok(chips
        .chunks_exact(gain)
        .enumerate()
        .map(|(k, block)| {
            block
                .iter()
                .zip(chips_for_bit(pn, k, gain, mode))
                .map(|(&x, &c)| x * f64::from(c))
                .sum()
        })
        .collect())
}

/// Hard sign decision on correlator outputs; ties decide `+1`.
pub fn decide(correlations: &[f64]) -> DataBits {
    DataBits(correlations.iter().map(|&z| if z >= 0.0 { 1 } else { -1 }).collect())
}
