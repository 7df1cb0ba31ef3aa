use std::path::Path;
use std::process::{Command, Output};

use overlay_ber::scenario::{ParseError, ScenarioSpec};
use overlay_ber::sim::SimConfig;
use overlay_ber::parse_scenario;
use proptest::prelude::*;

const BIN: &str = env!("CARGO_BIN_EXE_overlay-ber");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn forty_station_scenario() {
    let s = parse_scenario(
        "# forty stations\nstations = 40\noffset = 0\nchip_rate = 10 Mcps\n\
         interference_bandwidth = 20 MHz\np_over_pj_db = -10\neb_n0_db = 0:1:12\n",
    )
    .unwrap();
    assert_eq!(s.band.station_count(), 40);
    assert_eq!(s.dsss.chip_rate(), 10e6);
    assert_eq!(s.geom.interference_bandwidth(), 20e6);
    assert_eq!(s.dsss.carrier_freq(), 97.75e6);
    assert!((s.station_power() - 10.0).abs() < 1e-12);
}

#[test]
fn missing_keys_are_all_listed() {
    let err = parse_scenario("").unwrap_err();
    let ParseError::Missing(keys) = err else { panic!("{err:?}") };
    assert_eq!(keys, ["stations", "offset", "p_over_pj_db", "eb_n0_db"]);
}

fn spec_strategy() -> impl Strategy<Value = ScenarioSpec> {
    (
        0usize..60,
        -20e6f64..20e6,
        -30.0f64..30.0,
        proptest::collection::vec(0.01f64..3.0, 1..8),
        (1e5f64..2e7, 1u32..500, 1e4f64..1e6, 1e3f64..3e5),
        (1u32..50, any::<u64>(), 4usize..16, 1e-3f64..1.0),
        proptest::option::of(proptest::collection::vec(-5e6f64..5e6, 1..5)),
    )
        .prop_map(|(m, offset, level, steps, (fc, gain, spacing, w), (users, seed, spc, target), offs)| {
            let mut grid = vec![-3.0];
            for s in steps {
                grid.push(grid.last().unwrap() + s);
            }
            let mut spec = ScenarioSpec::new(m, offset, level, grid);
            spec.chip_rate = fc;
            spec.processing_gain = gain;
            spec.station_spacing = spacing;
            spec.station_std_dev = w;
            spec.users = users;
            spec.offset_grid = offs;
            spec.sim = SimConfig { seed, samples_per_chip: spc, target_rel_variance: target, ..SimConfig::default() };
            spec
        })
}

proptest! {
    #[test]
    fn serialize_parse_round_trip(spec in spec_strategy()) {
        let s = spec.build().unwrap();
        let text = s.to_config_string();
        prop_assert_eq!(parse_scenario(&text).unwrap(), s);
    }
}

#[test]
fn cli_analytic_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f3.cfg",
        "stations = 40\noffset = 0\ninterference_bandwidth = 20\np_over_pj_db = 0\neb_n0_db = 0:1:12\n",
    );
    let out = run(&["analytic", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sweep_value,pe,method,converged,warnings"));
    let pes: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(pes.len(), 13);
    assert!(pes.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn cli_siga_users_to_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f6.cfg",
        "stations = 40\noffset = 0\np_over_pj_db = -20\neb_n0_db = 10\nusers = 30\n",
    );
    let out_dir = dir.path().join("out");
    let out = run(&["siga", "--config", &cfg, "--axis", "users", "--out", out_dir.to_str().unwrap(), "--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("siga_users.csv")).unwrap();
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn cli_errors_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "stations = 4\nwobble = 1\n");
    let out = run(&["analytic", "--config", &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let cfg = write(dir.path(), "ok.cfg", "stations = 4\noffset = 0\np_over_pj_db = 0\neb_n0_db = 5\n");
    assert!(!run(&["analytic", "--config", &cfg, "--axis", "users"]).status.success());
    assert!(!run(&["analytic", "--config", &cfg, "--axis", "sideways"]).status.success());
    assert!(!run(&["figure", "fig42"]).status.success());

    // A window wider than the main lobe only warns.
    let wide = write(
        dir.path(),
        "wide.cfg",
        "stations = 40\noffset = fc/2\nchip_rate = 1\ninterference_bandwidth = 20\np_over_pj_db = 0\neb_n0_db = 5\n",
    );
    let out = run(&["analytic", "--config", &wide]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("interference-wider-than-main-lobe"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn cli_fit() {
    let dir = tempfile::tempdir().unwrap();
    let truth = overlay_ber::GaussianFitParams::measured_station();
    let samples = overlay_ber::fm::synthetic_spectrum(&truth, 1e6, 401, 0.5, 1);
    let path = dir.path().join("spectrum.csv");
    overlay_ber::fm::write_spectrum_csv(std::fs::File::create(&path).unwrap(), &samples).unwrap();
    let out = run(&["fit", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[2] - 100e6).abs() < 1e4);
}

#[test]
fn cli_figure_writes_family_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["figure", "fig5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let wide = std::fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    let mut lines = wide.lines();
    assert_eq!(lines.next(), Some("sweep_value,ppj_-20db,ppj_-10db,ppj_0db,ideal_bpsk"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ideal: f64 = first[4].parse().unwrap();
    assert!((ideal - 7.864_960_352_514_257e-2).abs() < 1e-15);
    for f in ["fig5_ppj_-20db.csv", "fig5_ppj_0db.csv", "fig5_ideal_bpsk.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
