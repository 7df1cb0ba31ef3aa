//! Globally adaptive Gauss-Kronrod (7/15) quadrature over a set of
//! caller-chosen starting panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {panels} panels: \
         achieved relative error {achieved:e}, requested {requested:e}"
    )]
    NotConverged { panels: usize, achieved: f64, requested: f64, value: f64 },
    #[error("integrand returned a non-finite value at {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Hard cap on the number of live panels.
    pub max_panels: usize,
    /// Each starting interval is cut into this many equal panels before
    /// adaptation begins.
    pub base_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_panels: 1_000_000, base_panels: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over the union of consecutive intervals delimited by
/// `breakpoints` (sorted, at least two entries). Duplicate breakpoints are
/// ignored.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    config: &QuadratureConfig,
) -> Result<Integral, QuadratureError> {
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let n = config.base_panels.max(1);
        let step = (hi - lo) / n as f64;
        for i in 0..n {
            let a = lo + step * i as f64;
            let b = if i + 1 == n { hi } else { lo + step * (i + 1) as f64 };
            heap.push(kronrod(&f, a, b)?);
        }
    }

    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    // Re-summing from scratch every so often keeps the running totals honest.
    let mut since_resum = 0usize;
    loop {
        let tol = config.rel_tol * value.abs();
        if error <= tol || error <= f64::MIN_POSITIVE {
            let (v, e) = totals(&heap);
            if e <= config.rel_tol * v.abs() || e <= f64::MIN_POSITIVE {
                return Ok(Integral { value: v, abs_error: e, panels: heap.len() });
            }
            value = v;
            error = e;
            continue;
        }
        if heap.len() + 1 > config.max_panels {
            let (v, e) = totals(&heap);
            return Err(QuadratureError::NotConverged {
                panels: heap.len(),
                achieved: if v != 0.0 { e / v.abs() } else { f64::INFINITY },
                requested: config.rel_tol,
                value: v,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            let (v, e) = totals(&heap);
            return Err(QuadratureError::NotConverged {
                panels: heap.len() + 1,
                achieved: (e + worst.error) / (v + worst.value).abs(),
                requested: config.rel_tol,
                value: v + worst.value,
            });
        }
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        since_resum += 1;
        if since_resum == 256 {
            (value, error) = totals(&heap);
            since_resum = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, &[0.0, 2.0], &Default::default())
            .unwrap();
        let exact = 64.0 / 6.0 - 8.0 + 2.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass() {
        let s = 3.0;
        let g = |x: f64| (-(x * x) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
        let r = integrate(g, &[-40.0 * s, -6.0 * s, 0.0, 6.0 * s, 40.0 * s], &Default::default())
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let r = integrate(|x: f64| x.sin().powi(2), &[0.0, 100.0], &Default::default()).unwrap();
        let exact = 50.0 - (200.0f64).sin() / 4.0;
        assert!(((r.value - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadratureConfig { rel_tol: 1e-14, max_panels: 3, base_panels: 1 };
        let err = integrate(|x: f64| x.abs().sqrt(), &[-1.0, 1.0], &cfg).unwrap_err();
        assert!(matches!(err, QuadratureError::NotConverged { panels: 3, .. }));
    }

    #[test]
    fn zero_integrand_converges() {
        let r = integrate(|_| 0.0, &[0.0, 1.0], &Default::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn non_finite_is_an_error() {
        let err = integrate(|_| f64::NAN, &[0.0, 1.0], &Default::default()).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite(_)));
    }
}
