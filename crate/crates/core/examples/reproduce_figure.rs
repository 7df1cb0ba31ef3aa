//! Writes the CSVs of one figure preset.
//!
//! `cargo run --release --example reproduce_figure -- fig7 out/`

use std::path::PathBuf;

use overlay_ber::sim::DEFAULT_SEED;
use overlay_ber::sweep::{figure_preset, reproduce_figure};

fn main() {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "fig3".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "figures".into()));
    let preset = figure_preset(&id, DEFAULT_SEED).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1);
    });
    for family in &preset.families {
        let levels: Vec<f64> = family.curves.iter().map(|c| c.p_over_pj_db).collect();
        println!("{}: {:?} over {}, P/PJ {levels:?} dB", family.name, preset.method, preset.axis);
    }
    for path in reproduce_figure(&preset, &out).unwrap() {
        println!("wrote {}", path.display());
    }
}
