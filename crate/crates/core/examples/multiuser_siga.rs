//! Multi-user BER from the simplified improved Gaussian approximation,
//! sweeping the number of active users.

use overlay_ber::siga::ber_multi_user;
use overlay_ber::{
    db_to_linear, equivalent_interference, siga_moments, DsssParams, FmBand, GaussianFitParams,
    MultiUserScenario, NoiseSpec, OverlayGeometry,
};

fn main() {
    let band = FmBand::new(88e6, 0.5e6, 10, GaussianFitParams::measured_station(), 1.0).unwrap();
    let geom = OverlayGeometry::new(5e6, 5e6, band.center()).unwrap();
    let dsss = DsssParams::new(10e6, 50, 1.0, geom.carrier()).unwrap();

    for eb_n0_db in [5.0, 10.0] {
        let noise = NoiseSpec::for_eb_n0(&dsss, db_to_linear(eb_n0_db)).unwrap();
        let ieq = equivalent_interference(&noise, &dsss, &band, &geom).unwrap();
        println!(
            "Eb/N0 {eb_n0_db} dB: I_eq = {:.3e} (noise {:.3e}, FM {:.3e})",
            ieq.i_eq, ieq.noise_part, ieq.fm_part
        );
        for k in [1, 2, 5, 10, 20, 30] {
            let scenario = MultiUserScenario::new(k, dsss).unwrap();
            let m = siga_moments(&scenario);
            let p = ber_multi_user(&scenario, &noise, &band, &geom).unwrap();
            let flags: Vec<_> = p.warnings.iter().map(|w| w.label()).collect();
            println!(
                "  K={k:2}  mu={:.3e}  sigma={:.3e}  Pe={:.4e} {}",
                m.mu_psi,
                m.sigma_psi,
                p.pe,
                flags.join(",")
            );
        }
    }
}
