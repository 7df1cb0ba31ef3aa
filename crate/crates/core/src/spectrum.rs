//! Averaged-periodogram (Welch) PSD estimates of complex baseband records.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Two-sided PSD estimate on an ascending frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Bin centre frequencies in Hz, ascending from `-fs/2`.
    pub freqs: Vec<f64>,
    /// Density in power units per Hz.
    pub density: Vec<f64>,
    pub bin_width: f64,
}

impl PsdEstimate {
    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width
    }

    /// Power-weighted mean frequency.
    pub fn mean_frequency(&self) -> f64 {
        let total: f64 = self.density.iter().sum();
        self.freqs.iter().zip(&self.density).map(|(f, d)| f * d).sum::<f64>() / total
    }

    /// Power-weighted standard deviation of frequency (RMS bandwidth).
    pub fn std_dev(&self) -> f64 {
        let mean = self.mean_frequency();
        let total: f64 = self.density.iter().sum();
        let var = self
            .freqs
            .iter()
            .zip(&self.density)
            .map(|(f, d)| (f - mean).powi(2) * d)
            .sum::<f64>()
            / total;
        var.sqrt()
    }
}

/// Welch estimate with a Hann window and 50% overlap.
///
/// Returns `None` when the record is shorter than one segment or the
/// segment length is below 2.
pub fn welch_psd(samples: &[Complex64], sample_rate: f64, segment_len: usize) -> Option<PsdEstimate> {
    if segment_len < 2 || samples.len() < segment_len {
        return None;
    }
    let window: Vec<f64> = (0..segment_len)
        .map(|i| {
            let x = std::f64::consts::PI * i as f64 / segment_len as f64;
            x.sin().powi(2)
        })
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment_len);
    let hop = (segment_len / 2).max(1);

    let mut acc = vec![0.0; segment_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    let mut segments = 0usize;
    let mut start = 0;
    while start + segment_len <= samples.len() {
        for (b, (x, w)) in buf.iter_mut().zip(samples[start..].iter().zip(&window)) {
            *b = x * w;
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (segments as f64 * sample_rate * window_power);
    let bin_width = sample_rate / segment_len as f64;
    // Reorder bins so frequencies ascend from -fs/2.
    let half = segment_len / 2;
    let order = (half..segment_len).chain(0..half);
    let (freqs, density) = order
        .map(|k| {
            let f = if k >= half { k as f64 - segment_len as f64 } else { k as f64 } * bin_width;
            (f, acc[k] * scale)
        })
        .unzip();
    Some(PsdEstimate { freqs, density, bin_width })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tone_power_and_location() {
        let fs = 1e6;
        let f0 = 125e3;
        let x: Vec<_> = (0..1 << 14)
            .map(|n| Complex64::from_polar(2.0, 2.0 * std::f64::consts::PI * f0 * n as f64 / fs))
            .collect();
        let psd = welch_psd(&x, fs, 1024).unwrap();
        assert!((psd.total_power() - 4.0).abs() < 1e-9);
        assert!((psd.mean_frequency() - f0).abs() < psd.bin_width);
    }

    #[test]
    fn too_short() {
        assert!(welch_psd(&[Complex64::new(1.0, 0.0); 10], 1.0, 16).is_none());
    }
}
