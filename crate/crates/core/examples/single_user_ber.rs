//! Analytic single-user BER versus Eb/N0 for a 10-station band at three
//! carrier offsets.

use overlay_ber::{
    ber_single_user, db_to_linear, ideal_bpsk, interference_integral, DsssParams, FmBand,
    GaussianFitParams, NoiseSpec, OverlayGeometry,
};

fn main() {
    let chip_rate = 10e6;
    let p_over_pj_db = 0.0;
    let band = FmBand::new(
        88e6,
        0.5e6,
        10,
        GaussianFitParams::measured_station(),
        1.0 / db_to_linear(p_over_pj_db),
    )
    .unwrap();

    let offsets = [0.0, chip_rate / 2.0, chip_rate];
    let links: Vec<_> = offsets
        .iter()
        .map(|&off| {
            let geom = OverlayGeometry::new(off, 5e6, band.center()).unwrap();
            let dsss = DsssParams::new(chip_rate, 50, 1.0, geom.carrier()).unwrap();
            (dsss, geom)
        })
        .collect();

    for ((dsss, geom), off) in links.iter().zip(offsets) {
        let j = interference_integral(dsss, &band, geom).unwrap();
        println!("offset {:4.1} MHz: chip-weighted FM power {:.4e} W", off / 1e6, j);
    }
    println!("\nEb/N0   f=0          f=fc/2       f=fc         ideal");
    for e in (0..=12).step_by(2) {
        let e = f64::from(e);
        let mut line = format!("{e:4}  ");
        for (dsss, geom) in &links {
            let noise = NoiseSpec::for_eb_n0(dsss, db_to_linear(e)).unwrap();
            let p = ber_single_user(dsss, &noise, &band, geom).unwrap();
            line.push_str(&format!(" {:.4e}", p.pe));
        }
        line.push_str(&format!(" {:.4e}", ideal_bpsk(db_to_linear(e))));
        println!("{line}");
    }
}
