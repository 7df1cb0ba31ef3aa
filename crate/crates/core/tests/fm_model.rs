use overlay_ber::fm::synthetic_spectrum;
use overlay_ber::quadrature::{integrate, QuadratureConfig};
use overlay_ber::{
    aggregate_band, band_psd, fit_gaussian_psd, station_psd_dbm, BandPsdMode, FmBand,
    GaussianFitParams, GaussianMixture,
};
use proptest::prelude::*;

fn band(m: usize, spacing: f64, power: f64) -> FmBand {
    FmBand::new(88e6, spacing, m, GaussianFitParams::measured_station(), power).unwrap()
}

fn integrate_band(b: &FmBand, weight: impl Fn(f64) -> f64) -> f64 {
    let w = b.shape().std_dev_hz();
    let lo = b.station_center(0) - 12.0 * w;
    let hi = b.station_center(b.station_count() - 1) + 12.0 * w;
    let mut breaks: Vec<f64> = vec![lo];
    breaks.extend(b.station_centers());
    breaks.push(hi);
    let cfg = QuadratureConfig { rel_tol: 1e-12, ..QuadratureConfig::default() };
    integrate(|f| weight(f) * band_psd(f, b, BandPsdMode::Physical), &breaks, &cfg).unwrap().value
}

proptest! {
    #[test]
    fn station_shape_is_symmetric(delta in 0.0f64..2e6, center in 80e6f64..110e6) {
        let p = GaussianFitParams::measured_station().with_center(center).unwrap();
        let a = station_psd_dbm(center + delta, &p);
        let b = station_psd_dbm(center - delta, &p);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs());
    }

    #[test]
    fn band_is_nonnegative(m in 1usize..50, f in 80e6f64..120e6) {
        prop_assert!(band_psd(f, &band(m, 0.5e6, 1.0), BandPsdMode::Physical) >= 0.0);
    }
}

#[test]
fn band_integrates_to_total_power() {
    for (m, spacing, power) in [(1, 0.5e6, 1.0), (10, 0.5e6, 0.1), (40, 0.5e6, 2.5), (7, 0.2e6, 1.0)] {
        let b = band(m, spacing, power);
        let total = integrate_band(&b, |_| 1.0);
        let want = m as f64 * power;
        assert!(((total - want) / want).abs() < 1e-9, "M={m}: {total} vs {want}");
        assert!(((b.total_power() - want) / want).abs() < 1e-15);
    }
}

#[test]
fn aggregate_centre_is_power_weighted_mean() {
    for m in [1, 2, 10, 40] {
        let b = band(m, 0.5e6, 1.0);
        let mean = integrate_band(&b, |f| f) / integrate_band(&b, |_| 1.0);
        let agg = aggregate_band(&b).unwrap();
        assert!((agg.center - mean).abs() < 1e-3, "M={m}: {} vs {mean}", agg.center);
        assert_eq!(agg.total_power, m as f64);
    }
}

#[test]
fn noisy_fit_recovers_centre_and_width() {
    let truth = GaussianFitParams::measured_station();
    let mut good = 0;
    for seed in 0..100 {
        let samples = synthetic_spectrum(&truth, 1e6, 401, 1.0, seed);
        let Ok(fit) = fit_gaussian_psd(&samples) else { continue };
        let centre_ok = (fit.center_hz() - truth.center_hz()).abs() <= 0.01e6;
        let width_ok = ((fit.std_dev_hz() - truth.std_dev_hz()) / truth.std_dev_hz()).abs() <= 0.05;
        if centre_ok && width_ok {
            good += 1;
        }
    }
    assert!(good >= 95, "{good} of 100 fits within tolerance");
}

#[test]
fn fit_of_db_sum_band_finds_the_middle_station() {
    let b = band(3, 0.5e6, 1.0);
    let samples: Vec<_> = (0..301)
        .map(|i| {
            let f = 88.25e6 + f64::from(i) * 2e3;
            (f, band_psd(f, &b, BandPsdMode::DbSum))
        })
        .collect();
    let fit = fit_gaussian_psd(&samples).unwrap();
    assert!((fit.center_hz() - 88.5e6).abs() < 1e3);
}
