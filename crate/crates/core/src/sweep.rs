//! Parameter sweeps over a [`Scenario`], CSV output and the figure presets.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{ber_single_user, BerError, BerMethod, BerWarning};
use crate::db_to_linear;
use crate::scenario::{ParseError, Scenario, ScenarioSpec};
use crate::siga::{ber_siga, equivalent_interference, siga_moments, MultiUserScenario};
use crate::sim::{run_link, BerEstimate, SimConfig, SimError};
use crate::special::ideal_bpsk;

/// Header of every sweep CSV.
pub const CSV_HEADER: &str = "sweep_value,pe,method,converged,warnings";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Incompatible(String),
    #[error(transparent)]
    Ber(#[from] BerError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Scenario(#[from] ParseError),
    #[error("unknown figure `{0}` (expected fig3 .. fig10)")]
    UnknownFigure(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Siga,
    Simulate,
}

/// The quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Axis {
    /// `Eb/N0` in dB, from the scenario's grid.
    #[default]
    EbN0,
    /// Number of users `K = 1 ..= users`.
    Users,
    /// SS carrier offset in Hz, from the scenario's `offset_sweep`.
    Offset,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eb_n0" | "ebn0" | "snr" => Ok(Axis::EbN0),
            "users" | "k" => Ok(Axis::Users),
            "offset" => Ok(Axis::Offset),
            _ => Err(format!("unknown axis `{s}` (expected eb_n0, users or offset)")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::EbN0 => "eb_n0",
            Axis::Users => "users",
            Axis::Offset => "offset",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub pe: f64,
    pub method: BerMethod,
    pub converged: bool,
    pub warnings: Vec<BerWarning>,
    /// Monte Carlo counts and seed, for simulated rows.
    pub estimate: Option<BerEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, writer: W) -> io::Result<()> {
        write_rows(writer, &self.rows)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

fn write_rows<W: Write>(writer: W, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        let warnings: Vec<&str> = r.warnings.iter().map(|w| w.label()).collect();
        w.write_record([
            format!("{}", r.sweep_value),
            format!("{:.14e}", r.pe),
            r.method.label().to_string(),
            r.converged.to_string(),
            warnings.join(";"),
        ])?;
    }
    w.flush()
}

/// Mixes a run seed with a grid index so every grid point draws its own
/// independent streams.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_compatible(scenario: &Scenario, method: Method, axis: Axis) -> Result<(), SweepError> {
    let bad = |m: &str| Err(SweepError::Incompatible(m.to_string()));
    if axis == Axis::Users && method != Method::Siga {
        return bad("the users axis needs the siga method");
    }
    if method == Method::Simulate && scenario.users != 1 {
        return bad("the simulator models a single user; set users = 1 or use siga");
    }
    if method == Method::Analytic && scenario.users != 1 {
        return bad("the analytic method is single-user; set users = 1 or use siga");
    }
    if matches!(axis, Axis::Users | Axis::Offset) && scenario.eb_n0_grid_db.len() != 1 {
        return bad("users and offset sweeps need exactly one eb_n0_db value");
    }
    if axis == Axis::Offset && scenario.offset_grid.is_none() {
        return bad("the offset axis needs offset_sweep in the scenario");
    }
    Ok(())
}

/// Evaluates `method` at every point of `axis`. Rows come back in grid
/// order; points run in parallel on the current rayon pool.
pub fn run_sweep(scenario: &Scenario, method: Method, axis: Axis) -> Result<SweepResult, SweepError> {
    check_compatible(scenario, method, axis)?;
    let eb_n0 = scenario.eb_n0_grid_db[0];
    let offset = scenario.geom.offset();
    let points: Vec<(f64, f64, f64, u32)> = match axis {
        Axis::EbN0 => scenario
            .eb_n0_grid_db
            .iter()
            .map(|&e| (e, e, offset, scenario.users))
            .collect(),
        Axis::Users => (1..=scenario.users).map(|k| (k as f64, eb_n0, offset, k)).collect(),
        Axis::Offset => scenario
            .offset_grid
            .as_ref()
            .expect("checked")
            .iter()
            .map(|&o| (o, eb_n0, o, scenario.users))
            .collect(),
    };
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, &(value, eb_n0_db, offset, users))| {
            evaluate(scenario, method, value, eb_n0_db, offset, users, i)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult { axis, rows })
}

fn evaluate(
    scenario: &Scenario,
    method: Method,
    value: f64,
    eb_n0_db: f64,
    offset: f64,
    users: u32,
    index: usize,
) -> Result<SweepRow, SweepError> {
    let (dsss, geom) = scenario.at_offset(offset)?;
    let noise = scenario.noise_at(eb_n0_db)?;
    let row = |pe, method, converged, warnings, estimate| SweepRow {
        sweep_value: value,
        pe,
        method,
        converged,
        warnings,
        estimate,
    };
    match method {
        Method::Analytic => {
            let p = ber_single_user(&dsss, &noise, &scenario.band, &geom)?;
            Ok(row(p.pe, p.method, true, p.warnings, None))
        }
        Method::Siga => {
            let multi = MultiUserScenario::new(users, dsss)?;
            let ieq = equivalent_interference(&noise, &dsss, &scenario.band, &geom)?;
            let mut p = ber_siga(dsss.bit_energy(), &multi, &ieq, &siga_moments(&multi))?;
            if geom.exceeds_main_lobe(&dsss) {
                p.warnings.insert(0, BerWarning::WideInterference);
            }
            Ok(row(p.pe, p.method, true, p.warnings, None))
        }
        Method::Simulate => {
            let link = scenario.link_at(eb_n0_db, offset)?;
            let sim = SimConfig { seed: point_seed(scenario.sim.seed, index), ..scenario.sim };
            let est = run_link(&link, &sim)?;
            let warnings = if geom.exceeds_main_lobe(&dsss) {
                vec![BerWarning::WideInterference]
            } else {
                Vec::new()
            };
            Ok(row(est.pe_hat, BerMethod::MonteCarlo, est.converged, warnings, Some(est)))
        }
    }
}

/// Ideal BPSK rows over the same sweep values, for reference curves.
pub fn ideal_rows(scenario: &Scenario, axis: Axis) -> Vec<SweepRow> {
    let row = |value: f64, eb_n0_db: f64| SweepRow {
        sweep_value: value,
        pe: ideal_bpsk(db_to_linear(eb_n0_db)),
        method: BerMethod::IdealBpsk,
        converged: true,
        warnings: Vec::new(),
        estimate: None,
    };
    let e = scenario.eb_n0_grid_db[0];
    match axis {
        Axis::EbN0 => scenario.eb_n0_grid_db.iter().map(|&v| row(v, v)).collect(),
        Axis::Users => (1..=scenario.users).map(|k| row(k as f64, e)).collect(),
        Axis::Offset => {
            scenario.offset_grid.iter().flatten().map(|&o| row(o, e)).collect()
        }
    }
}

/// One curve of a figure.
#[derive(Debug, Clone)]
pub struct Curve {
    pub p_over_pj_db: f64,
    pub scenario: Scenario,
}

/// Curves that share an x-axis and end up in one wide CSV.
#[derive(Debug, Clone)]
pub struct Family {
    /// File stem, e.g. `fig6_ebn0_5db`.
    pub name: String,
    pub curves: Vec<Curve>,
}

#[derive(Debug, Clone)]
pub struct FigurePreset {
    pub id: String,
    pub method: Method,
    pub axis: Axis,
    pub families: Vec<Family>,
}

struct Params {
    stations: usize,
    offset: f64,
    chip_rate: f64,
    bandwidth: Option<f64>,
}

/// Number of users swept in the multi-user figures.
pub const FIGURE_MAX_USERS: u32 = 30;

/// Builds the preset for `fig3` .. `fig10`, with `seed` for simulated
/// figures.
pub fn figure_preset(id: &str, seed: u64) -> Result<FigurePreset, SweepError> {
    let id = id.trim().to_ascii_lowercase();
    let num: u32 = id
        .strip_prefix("fig")
        .unwrap_or(&id)
        .parse()
        .map_err(|_| SweepError::UnknownFigure(id.clone()))?;
    let name = format!("fig{num}");
    let analytic_grid: Vec<f64> = (0..=12).map(f64::from).collect();
    let sim_grid: Vec<f64> = (0..=4).map(|i| 2.0 * f64::from(i)).collect();

    let ebn0 = |grid: &[f64]| vec![grid.to_vec()];
    let users_families = vec![vec![5.0], vec![10.0]];
    let low = vec![-20.0, -10.0, 0.0];
    let high = vec![0.0, 5.0, 10.0];
    let p = match num {
        3 => Params { stations: 40, offset: 0.0, chip_rate: 10e6, bandwidth: Some(20e6) },
        4 => Params { stations: 40, offset: 0.5e6, chip_rate: 1e6, bandwidth: Some(20e6) },
        5 => Params { stations: 10, offset: 5e6, chip_rate: 5e6, bandwidth: Some(5e6) },
        6 => Params { stations: 40, offset: 0.0, chip_rate: 10e6, bandwidth: None },
        // Figures 7 and 8 coincide: f_c / 2 is 5 MHz at 10 Mcps.
        7 | 8 | 10 => Params { stations: 10, offset: 5e6, chip_rate: 10e6, bandwidth: None },
        9 => Params { stations: 10, offset: 0.0, chip_rate: 10e6, bandwidth: None },
        _ => return Err(SweepError::UnknownFigure(id)),
    };
    let (method, axis, families, levels) = match num {
        3..=5 => (Method::Analytic, Axis::EbN0, ebn0(&analytic_grid), low),
        6..=8 => (Method::Siga, Axis::Users, users_families, low),
        _ => (Method::Simulate, Axis::EbN0, ebn0(&sim_grid), high),
    };
    let Params { stations, offset, chip_rate, bandwidth } = p;

    let families = families
        .into_iter()
        .map(|grid| {
            let family_name = if axis == Axis::Users {
                format!("{name}_ebn0_{}db", grid[0])
            } else {
                name.clone()
            };
            let curves = levels
                .iter()
                .map(|&level| {
                    let mut spec = ScenarioSpec::new(stations, offset, level, grid.clone());
                    spec.chip_rate = chip_rate;
                    spec.interference_bandwidth = bandwidth;
                    if axis == Axis::Users {
                        spec.users = FIGURE_MAX_USERS;
                    }
                    spec.sim.seed = seed;
                    Ok(Curve { p_over_pj_db: level, scenario: spec.build()? })
                })
                .collect::<Result<Vec<_>, SweepError>>()?;
            Ok(Family { name: family_name, curves })
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    Ok(FigurePreset { id: name, method, axis, families })
}

fn level_tag(level: f64) -> String {
    format!("ppj_{level}db")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), SweepError> {
    fs::write(path, bytes).map_err(|source| SweepError::Io { path: path.to_path_buf(), source })
}

/// Runs a figure preset and writes its CSVs into `out_dir`:
///
/// * `<family>_ppj_<level>db.csv`: one sweep CSV per curve;
/// * `<family>_ideal_bpsk.csv`: the ideal BPSK reference;
/// * `<family>.csv`: a wide table with one column per curve. Simulated
///   figures also carry the analytic prediction of each curve.
///
/// Returns the paths written.
pub fn reproduce_figure(preset: &FigurePreset, out_dir: &Path) -> Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(out_dir)
        .map_err(|source| SweepError::Io { path: out_dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for family in &preset.families {
        let mut columns: Vec<(String, Vec<SweepRow>)> = Vec::new();
        for curve in &family.curves {
            let result = run_sweep(&curve.scenario, preset.method, preset.axis)?;
            let tag = level_tag(curve.p_over_pj_db);
            let path = out_dir.join(format!("{}_{tag}.csv", family.name));
            write_file(&path, result.to_csv_string().as_bytes())?;
            written.push(path);
            columns.push((tag.clone(), result.rows));
            if preset.method == Method::Simulate {
                let analytic = run_sweep(&curve.scenario, Method::Analytic, preset.axis)?;
                columns.push((format!("analytic_{tag}"), analytic.rows));
            }
        }
        let first = &family.curves[0].scenario;
        let ideal = ideal_rows(first, preset.axis);
        let path = out_dir.join(format!("{}_ideal_bpsk.csv", family.name));
        let mut buf = Vec::new();
        write_rows(&mut buf, &ideal).expect("in-memory write");
        write_file(&path, &buf)?;
        written.push(path);
        columns.push(("ideal_bpsk".to_string(), ideal));

        let path = out_dir.join(format!("{}.csv", family.name));
        write_file(&path, wide_csv(&columns).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

fn wide_csv(columns: &[(String, Vec<SweepRow>)]) -> String {
    let mut out = String::from("sweep_value");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in columns[0].1.iter().enumerate() {
        out.push_str(&format!("{}", row.sweep_value));
        for (_, rows) in columns {
            out.push_str(&format!(",{:.14e}", rows[i].pe));
        }
        out.push('\n');
    }
    out
}
