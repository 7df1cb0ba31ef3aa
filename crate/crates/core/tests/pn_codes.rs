use overlay_ber::signal::{decide, despread, SignalError};
use overlay_ber::{
    generate_m_sequence, generate_random_sequence, spread, CodeMode, DataBits, DsssParams,
};
use proptest::prelude::*;

/// Straightforward shift register: `stages[0]` is stage 1 (input),
/// `stages[n - 1]` the output stage.
fn reference_register(n: usize, taps: &[u32], state: u64, len: usize) -> Vec<i8> {
    let mut stages: Vec<bool> = (0..n).map(|i| (state >> i) & 1 == 1).collect();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(if stages[n - 1] { -1 } else { 1 });
        let fb = taps.iter().fold(false, |acc, &t| acc ^ stages[t as usize - 1]);
        stages.rotate_right(1);
        stages[0] = fb;
    }
    out
}

fn reference_period(n: usize, taps: &[u32]) -> usize {
    let mut stages = vec![false; n];
    stages[0] = true;
    let start = stages.clone();
    for step in 1..=(1usize << n) {
        let fb = taps.iter().fold(false, |acc, &t| acc ^ stages[t as usize - 1]);
        stages.rotate_right(1);
        stages[0] = fb;
        if stages == start {
            return step;
        }
    }
    usize::MAX
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

#[test]
fn every_tap_set_up_to_ten_stages() {
    for n in 2..=10u32 {
        let full = (1usize << n) - 1;
        let mut maximal = 0;
        for subset in 0..(1u32 << (n - 1)) {
            let mut taps: Vec<u32> = (1..n).filter(|t| subset & (1 << (t - 1)) != 0).collect();
            taps.push(n);
            let got = generate_m_sequence(n, &taps, 1);
            if reference_period(n as usize, &taps) != full {
                assert!(matches!(got, Err(SignalError::NonMaximal { .. })), "n={n} taps={taps:?}");
                continue;
            }
            maximal += 1;
            let seq = got.unwrap();
            assert_eq!(seq.chips(), reference_register(n as usize, &taps, 1, full).as_slice());
            assert_eq!(seq.chip_sum(), -1, "balance n={n} taps={taps:?}");
            for lag in 1..full {
                assert_eq!(seq.periodic_autocorrelation(lag), -1, "n={n} lag={lag}");
            }
            assert_eq!(seq.periodic_autocorrelation(0), full as i64);
        }
        // Number of primitive polynomials of degree n.
        assert_eq!(maximal as u64, euler_phi(full as u64) / u64::from(n), "n={n}");
    }
}

#[test]
fn start_state_only_rotates_the_sequence() {
    let a = generate_m_sequence(5, &[5, 3], 1).unwrap();
    let b = generate_m_sequence(5, &[5, 3], 0b10110).unwrap();
    let n = a.period();
    assert!((0..n).any(|s| (0..n).all(|i| a.chips()[(i + s) % n] == b.chips()[i])));
}

#[test]
fn random_sequence_balance() {
    for seed in 0..20 {
        let len = 100_000;
        let s = generate_random_sequence(len, seed).unwrap();
        let mean = s.chip_sum() as f64 / len as f64;
        assert!(mean.abs() <= 5.0 / (len as f64).sqrt());
    }
}

proptest! {
    #[test]
    fn despread_recovers_bits(
        bits in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 1..40),
        gain in 1u32..80,
        seed in any::<u64>(),
        short in any::<bool>(),
    ) {
        let params = DsssParams::new(1e6, gain, 1.0, 100e6).unwrap();
        let data = DataBits::new(bits).unwrap();
        let mode = if short { CodeMode::Short } else { CodeMode::Long };
        let pn = generate_random_sequence(data.len() * gain as usize, seed).unwrap();
        let chips: Vec<f64> = spread(&data, &pn, &params, mode).unwrap().iter().map(|&c| f64::from(c)).collect();
        let z = despread(&chips, &pn, &params, mode).unwrap();
        for &v in &z {
            prop_assert_eq!(v.abs(), f64::from(gain));
        }
        prop_assert_eq!(decide(&z), data);
    }
}
