//! Bit-error-rate prediction and simulation for a direct-sequence spread
//! spectrum (DSSS) link that shares its band with narrowband FM broadcast
//! stations.
//!
//! The crate is organised by subsystem:
//!
//! * [`signal`]: PN codes, data bits, spreading and despreading.
//! * [`fm`]: the Gaussian FM station spectrum, multi-station bands, the
//!   aggregate-Gaussian approximation and least-squares spectrum fitting.
//! * [`analytic`]: single-user BER under FM interference plus AWGN.
//! * [`siga`]: multi-user BER with the simplified improved Gaussian
//!   approximation of multiple-access interference.
//! * [`sim`]: a complex-baseband Monte Carlo link simulator.
//! * [`scenario`] and [`sweep`]: scenario files, sweeps, figure presets and
//!   CSV output used by the `overlay-ber` binary.
//!
//! Runnable walkthroughs for each capability live in the crate's
//! `examples/` directory.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod fm;
pub mod quadrature;
pub mod scenario;
pub mod siga;
pub mod signal;
pub mod sim;
pub mod special;
pub mod spectrum;
pub mod sweep;

pub use analytic::{
    ber_single_user, interference_integral, noise_term_variance, BerError, BerMethod, BerPoint,
    BerWarning, NoiseSpec, OverlayGeometry,
};
pub use fm::{
    aggregate_band, band_psd, fit_gaussian_psd, station_psd_dbm, station_psd_linear,
    AggregateGaussian, BandPsdMode, FmBand, GaussianComponent, GaussianFitParams, GaussianMixture,
};
pub use scenario::{parse_scenario, Scenario};
pub use siga::{
    ber_siga, equivalent_interference, siga_moments, EquivalentInterference, MultiUserScenario,
    SigaMoments,
};
pub use signal::{
    generate_m_sequence, generate_random_sequence, spread, CodeMode, DataBits, DsssParams,
    PnSequence,
};
pub use sim::{run_link, stopping_rule, BerEstimate, SimConfig};
pub use special::{erfc, ideal_bpsk};
pub use sweep::{run_sweep, Axis, Method, SweepResult, SweepRow};

/// Converts a decibel ratio to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}
