//! Parse a scenario file and print analytic and SIGA sweeps as CSV.
//!
//! `cargo run --example scenario_sweep -- my.cfg` reads a file; without
//! an argument a built-in scenario is used.

use overlay_ber::sweep::{run_sweep, Axis, Method};
use overlay_ber::parse_scenario;

const BUILT_IN: &str = "\
# ten stations, carrier half a chip rate above the band centre
stations = 10
offset = fc/2
p_over_pj_db = -10
eb_n0_db = 0:2:12
offset_sweep = 0, 1, 2, 3, 4, 5, fc
";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable scenario"),
        None => BUILT_IN.to_string(),
    };
    let mut scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("{}", scenario.to_config_string());

    print!("{}", run_sweep(&scenario, Method::Analytic, Axis::EbN0).unwrap().to_csv_string());

    scenario.eb_n0_grid_db = vec![8.0];
    println!();
    print!("{}", run_sweep(&scenario, Method::Analytic, Axis::Offset).unwrap().to_csv_string());

    scenario.users = 10;
    println!();
    print!("{}", run_sweep(&scenario, Method::Siga, Axis::Users).unwrap().to_csv_string());
}
