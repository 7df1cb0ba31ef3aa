//! Waveform simulation of the overlay link, compared with the analytic
//! prediction, plus an optional dump of received baseband samples.
//!
//! `cargo run --release --example monte_carlo_link -- rx.iq` writes 20
//! bits of received samples as little-endian f64 I/Q pairs.

use std::time::Instant;

use overlay_ber::analytic::ber_from_integral;
use overlay_ber::sim::{render_received, write_iq_f64le};
use overlay_ber::{interference_integral, parse_scenario, run_link};

fn main() {
    let scenario = parse_scenario(
        "stations = 10\noffset = fc/2\np_over_pj_db = 0\neb_n0_db = 0, 3, 6\n\
         target_rel_variance = 0.02\n",
    )
    .unwrap();
    println!("seed {}", scenario.sim.seed);
    println!("Eb/N0  simulated (95% CI)                 analytic    analytic, J/2   bits");
    for &e in &scenario.eb_n0_grid_db {
        let link = scenario.link_at(e, scenario.geom.offset()).unwrap();
        let start = Instant::now();
        let est = run_link(&link, &scenario.sim).unwrap();
        let j = interference_integral(&link.dsss, &scenario.band, &link.geom).unwrap();
        let full = ber_from_integral(&link.dsss, &link.noise, j).unwrap();
        let half = ber_from_integral(&link.dsss, &link.noise, j / 2.0).unwrap();
        let (lo, hi) = est.confidence_interval_95();
        println!(
            "{e:4}   {:.3e} ({lo:.2e}, {hi:.2e})   {full:.3e}   {half:.3e}       {} in {:.1?}",
            est.pe_hat,
            est.bits,
            start.elapsed()
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        let link = scenario.link_at(6.0, scenario.geom.offset()).unwrap();
        let rx = render_received(&link, &scenario.sim, 0, 20).unwrap();
        let file = std::io::BufWriter::new(std::fs::File::create(&path).unwrap());
        write_iq_f64le(file, &rx).unwrap();
        println!("{} samples written to {path}", rx.len());
    }
}
