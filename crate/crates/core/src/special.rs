//! Special functions.

/// Complementary error function.
///
/// Backed by the `libm` port of the FreeBSD/musl implementation, which is
/// accurate to about one ulp over the whole real line.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Ideal coherent BPSK error probability `0.5 * erfc(sqrt(eb_n0))` for a
/// linear `eb_n0`.
pub fn ideal_bpsk(eb_n0: f64) -> f64 {
    0.5 * erfc(eb_n0.sqrt())
}

/// Normalised sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let px = std::f64::consts::PI * x;
    px.sin() / px
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 50-digit arithmetic.
    const REFERENCE: &[(f64, f64)] = &[
        (0.0, 1.0),
        (1e-8, 0.999_999_988_716_208_3),
        (0.1, 0.887_537_083_981_715_1),
        (0.25, 0.723_673_609_831_763_1),
        (0.5, 0.479_500_122_186_953_46),
        (1.0, 0.157_299_207_050_285_13),
        (1.5, 0.033_894_853_524_689_273),
        (2.0, 0.004_677_734_981_047_265_8),
        (3.0, 2.209_049_699_858_544_1e-5),
        (4.5, 1.966_160_441_542_887_5e-10),
        (6.0, 2.151_973_671_249_891_3e-17),
        (8.0, 1.122_429_717_298_292_7e-29),
        (10.0, 2.088_487_583_762_544_8e-45),
        (-0.5, 1.520_499_877_813_046_5),
        (-2.0, 1.995_322_265_018_952_7),
        (-10.0, 2.0),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(x, want) in REFERENCE {
            let got = erfc(x);
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-12, "erfc({x}) = {got:e}, want {want:e}, rel {rel:e}");
        }
    }

    #[test]
    fn reflection_identity() {
        for i in 0..=200 {
            let x = -10.0 + 0.1 * f64::from(i);
            assert!((erfc(x) + erfc(-x) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bpsk_at_zero_db() {
        assert!((ideal_bpsk(1.0) - 7.864_960_352_514_257e-2).abs() < 1e-17);
    }

    #[test]
    fn sinc_nulls() {
        assert_eq!(sinc(0.0), 1.0);
        for k in 1..5 {
            assert!(sinc(f64::from(k)).abs() < 1e-15);
        }
    }
}
