//! The Gaussian FM station model: one station, a band of stations, the
//! single-Gaussian approximation of the band, and fitting the model back
//! from a noisy analyzer-style trace.
//!
//! `cargo run --example fm_spectrum -- trace.csv` also writes the trace.

use overlay_ber::fm::{synthetic_spectrum, write_spectrum_csv};
use overlay_ber::{
    aggregate_band, band_psd, fit_gaussian_psd, station_psd_dbm, BandPsdMode, FmBand,
    GaussianFitParams, GaussianMixture,
};

fn main() {
    let station = GaussianFitParams::measured_station();
    println!("station PSD (dBm):");
    for k in -3..=3 {
        let f = station.center_hz() + f64::from(k) * station.std_dev_hz();
        println!("  {:+} sigma  {:9.3}", k, station_psd_dbm(f, &station));
    }

    let band = FmBand::new(88e6, 0.5e6, 40, station, 1e-3).unwrap();
    let agg = aggregate_band(&band).unwrap();
    println!(
        "40-station band: {:.3} MHz centre, total {:.3e} W; aggregate Gaussian sd {:.4} MHz",
        band.center() / 1e6,
        band.total_power(),
        agg.std_dev / 1e6
    );
    for f in [88.0e6, 88.25e6, 95.0e6, 97.75e6] {
        println!(
            "  {:.2} MHz  physical {:.3e} W/Hz  aggregate {:.3e} W/Hz",
            f / 1e6,
            band_psd(f, &band, BandPsdMode::Physical),
            agg.psd(f)
        );
    }

    let trace = synthetic_spectrum(&station, 1e6, 401, 1.0, 7);
    let fit = fit_gaussian_psd(&trace).expect("fit converges");
    println!(
        "fit of a 1 dB-noisy trace: floor {:.3} dBm, amplitude {:.3} dB, centre {:.4} MHz, sd {:.2} kHz, R^2 {:.4}",
        fit.floor_dbm(),
        fit.amplitude_db(),
        fit.center_hz() / 1e6,
        fit.std_dev_hz() / 1e3,
        fit.r_squared().unwrap_or(f64::NAN)
    );

    if let Some(path) = std::env::args().nth(1) {
        let file = std::fs::File::create(&path).expect("create output");
        write_spectrum_csv(file, &trace).expect("write trace");
        println!("trace written to {path}");
    }
}
