use overlay_ber::siga::ber_multi_user;
use overlay_ber::{
    ber_single_user, db_to_linear, DsssParams, FmBand, GaussianFitParams, MultiUserScenario,
    NoiseSpec, OverlayGeometry,
};
use proptest::prelude::*;

fn link(m: usize, offset: f64, level_db: f64) -> (DsssParams, FmBand, OverlayGeometry) {
    let band = FmBand::new(
        88e6,
        0.5e6,
        m,
        GaussianFitParams::measured_station(),
        1.0 / db_to_linear(level_db),
    )
    .unwrap();
    let geom = OverlayGeometry::new(offset, (m.max(1) as f64) * 0.5e6, band.center()).unwrap();
    let dsss = DsssParams::new(10e6, 50, 1.0, geom.carrier()).unwrap();
    (dsss, band, geom)
}

fn siga(k: u32, m: usize, offset: f64, level_db: f64, eb_n0_db: f64) -> f64 {
    let (dsss, band, geom) = link(m, offset, level_db);
    let noise = NoiseSpec::for_eb_n0(&dsss, db_to_linear(eb_n0_db)).unwrap();
    let s = MultiUserScenario::new(k, dsss).unwrap();
    ber_multi_user(&s, &noise, &band, &geom).unwrap().pe
}

proptest! {
    #[test]
    fn single_user_collapse(
        m in 0usize..41,
        offset in -10e6f64..10e6,
        level in -20.0f64..20.0,
        e in 0.0f64..12.0,
    ) {
        let (dsss, band, geom) = link(m, offset, level);
        let noise = NoiseSpec::for_eb_n0(&dsss, db_to_linear(e)).unwrap();
        let one = ber_single_user(&dsss, &noise, &band, &geom).unwrap().pe;
        let s = MultiUserScenario::new(1, dsss).unwrap();
        let multi = ber_multi_user(&s, &noise, &band, &geom).unwrap().pe;
        prop_assert!(((one - multi) / one).abs() < 1e-10, "{} vs {}", one, multi);
    }

    #[test]
    fn bounded_by_one_half(k in 1u32..200, m in 0usize..41, level in -30.0f64..30.0, e in -5.0f64..20.0) {
        let p = siga(k, m, 0.0, level, e);
        prop_assert!((0.0..=0.5).contains(&p));
    }
}

#[test]
fn monotone_in_users_interference_and_energy() {
    for (m, off) in [(40, 0.0), (10, 5e6), (10, 2.5e6)] {
        for level in [-20.0, -10.0, 0.0] {
            for e in [5.0, 10.0] {
                let by_k: Vec<f64> = (1..=30).map(|k| siga(k, m, off, level, e)).collect();
                assert!(by_k.windows(2).all(|w| w[1] >= w[0]), "M={m} P/PJ={level} Eb/N0={e}");
            }
            let by_e: Vec<f64> = (0..=12).map(|e| siga(5, m, off, level, f64::from(e))).collect();
            assert!(by_e.windows(2).all(|w| w[1] <= w[0]));
        }
        let by_power: Vec<f64> = (-20..=20).rev().map(|l| siga(5, m, off, f64::from(l), 8.0)).collect();
        assert!(by_power.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn more_users_hurt_most_without_fm() {
    let quiet = siga(20, 10, 5e6, 20.0, 10.0) / siga(1, 10, 5e6, 20.0, 10.0);
    let loud = siga(20, 10, 5e6, -20.0, 10.0) / siga(1, 10, 5e6, -20.0, 10.0);
    assert!(quiet > loud);
}
