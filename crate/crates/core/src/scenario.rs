//! Scenario files: one overlay experiment in `key = value` form.
//!
//! ```text
//! # forty stations, carrier on the band centre
//! stations = 40
//! offset = 0                     # MHz, or fc, fc/2, 2.5*fc, "500 kHz"
//! chip_rate = 10                 # MHz
//! interference_bandwidth = 20    # MHz
//! p_over_pj_db = -10
//! eb_n0_db = 0:1:12              # start:step:stop, or a comma list
//! ```
//!
//! Frequencies without a unit are MHz; `Hz`, `kHz`, `MHz`, `GHz` and the
//! chip-rate spellings `cps`, `kcps`, `Mcps` are accepted as suffixes.
//! Power levels are ratios in dB. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::analytic::{BerError, NoiseSpec, OverlayGeometry};
use crate::fm::{FmBand, GaussianFitParams};
use crate::signal::DsssParams;
use crate::sim::{LinkSpec, SimConfig};
use crate::db_to_linear;

/// Reference SS power. Only power ratios matter, so it is fixed at 1 W.
pub const SS_POWER: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` was already set on line {first}")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}: `{key}`: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("inconsistent scenario: {0}")]
    Inconsistent(String),
}

const REQUIRED: &[&str] = &["stations", "offset", "p_over_pj_db", "eb_n0_db"];
const OPTIONAL: &[&str] = &[
    "chip_rate",
    "processing_gain",
    "first_station",
    "station_spacing",
    "station_std_dev",
    "interference_bandwidth",
    "users",
    "offset_sweep",
    "samples_per_chip",
    "target_rel_variance",
    "max_bits",
    "seed",
    "fm_message_cutoff",
];

/// A fully validated overlay experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dsss: DsssParams,
    pub band: FmBand,
    pub geom: OverlayGeometry,
    pub p_over_pj_db: f64,
    pub users: u32,
    /// Strictly increasing `Eb/N0` values, dB.
    pub eb_n0_grid_db: Vec<f64>,
    /// Offsets for offset sweeps, Hz.
    pub offset_grid: Option<Vec<f64>>,
    pub sim: SimConfig,
}

/// Inputs in physical units, before cross-field validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub stations: usize,
    pub offset: f64,
    pub p_over_pj_db: f64,
    pub eb_n0_grid_db: Vec<f64>,
    pub chip_rate: f64,
    pub processing_gain: u32,
    pub first_station: f64,
    pub station_spacing: f64,
    pub station_std_dev: f64,
    /// Defaults to `stations * station_spacing` (or `2 * chip_rate` for an
    /// empty band).
    pub interference_bandwidth: Option<f64>,
    pub users: u32,
    pub offset_grid: Option<Vec<f64>>,
    pub sim: SimConfig,
}

impl ScenarioSpec {
    pub fn new(stations: usize, offset: f64, p_over_pj_db: f64, eb_n0_grid_db: Vec<f64>) -> Self {
        Self {
            stations,
            offset,
            p_over_pj_db,
            eb_n0_grid_db,
            chip_rate: 10e6,
            processing_gain: 50,
            first_station: 88e6,
            station_spacing: 0.5e6,
            station_std_dev: GaussianFitParams::measured_station().std_dev_hz(),
            interference_bandwidth: None,
            users: 1,
            offset_grid: None,
            sim: SimConfig::default(),
        }
    }

    pub fn build(&self) -> Result<Scenario, ParseError> {
        let bad = |m: String| ParseError::Inconsistent(m);
        if self.eb_n0_grid_db.is_empty() {
            return Err(bad("eb_n0_db grid is empty".into()));
        }
        if let Some(w) = self.eb_n0_grid_db.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(bad(format!("eb_n0_db grid not strictly increasing at {} -> {}", w[0], w[1])));
        }
        if self.eb_n0_grid_db.iter().any(|x| !x.is_finite()) || !self.p_over_pj_db.is_finite() {
            return Err(bad("dB values must be finite".into()));
        }
        if self.users == 0 {
            return Err(bad("users must be >= 1".into()));
        }
        if matches!(&self.offset_grid, Some(g) if g.is_empty()) {
            return Err(bad("offset_sweep is empty".into()));
        }
        let shape = GaussianFitParams::measured_station()
            .with_std_dev(self.station_std_dev)
            .map_err(|e| bad(e.to_string()))?;
        let station_power = SS_POWER / db_to_linear(self.p_over_pj_db);
        let band = FmBand::new(
            self.first_station,
            self.station_spacing,
            self.stations,
            shape,
            station_power,
        )
        .map_err(|e| bad(e.to_string()))?;
        let bandwidth = self.interference_bandwidth.unwrap_or(if self.stations > 0 {
            self.stations as f64 * self.station_spacing
        } else {
            2.0 * self.chip_rate
        });
        if bandwidth < band.extent() {
            return Err(bad(format!(
                "interference bandwidth {} MHz is narrower than the {} MHz spanned by the stations",
                bandwidth / 1e6,
                band.extent() / 1e6
            )));
        }
        let geom = OverlayGeometry::new(self.offset, bandwidth, band.center())
            .map_err(|e| bad(e.to_string()))?;
        let dsss = DsssParams::new(self.chip_rate, self.processing_gain, SS_POWER, geom.carrier())
            .map_err(|e| bad(e.to_string()))?;
        if let Some(grid) = &self.offset_grid {
            for &o in grid {
                OverlayGeometry::new(o, bandwidth, band.center())
                    .and_then(|g| {
                        dsss.with_carrier(g.carrier())
                            .map_err(|e| BerError::InvalidGeometry(e.to_string()))
                    })
                    .map_err(|e| bad(format!("offset_sweep value {o} Hz: {e}")))?;
            }
        }
        self.sim.validate().map_err(|e| bad(e.to_string()))?;
        Ok(Scenario {
            dsss,
            band,
            geom,
            p_over_pj_db: self.p_over_pj_db,
            users: self.users,
            eb_n0_grid_db: self.eb_n0_grid_db.clone(),
            offset_grid: self.offset_grid.clone(),
            sim: self.sim,
        })
    }
}

impl Scenario {
    pub fn station_power(&self) -> f64 {
        self.band.station_power()
    }

    /// Geometry and SS parameters with the carrier moved to `offset`.
    pub fn at_offset(&self, offset: f64) -> Result<(DsssParams, OverlayGeometry), BerError> {
        let geom = OverlayGeometry::new(
            offset,
            self.geom.interference_bandwidth(),
            self.geom.interference_center(),
        )?;
        let dsss = self
            .dsss
            .with_carrier(geom.carrier())
            .map_err(|e| BerError::InvalidGeometry(e.to_string()))?;
        Ok((dsss, geom))
    }

    pub fn noise_at(&self, eb_n0_db: f64) -> Result<NoiseSpec, BerError> {
        NoiseSpec::for_eb_n0(&self.dsss, db_to_linear(eb_n0_db))
    }

    pub fn link_at(&self, eb_n0_db: f64, offset: f64) -> Result<LinkSpec, BerError> {
        let (dsss, geom) = self.at_offset(offset)?;
        Ok(LinkSpec { dsss, noise: self.noise_at(eb_n0_db)?, band: self.band, geom })
    }

    /// Writes every field back out in a form [`parse_scenario`] reads to
    /// an identical scenario.
    pub fn to_config_string(&self) -> String {
        let hz = |v: f64| format!("{v:?} Hz");
        let list = |v: &[f64], unit: &str| {
            v.iter().map(|x| format!("{x:?}{unit}")).collect::<Vec<_>>().join(", ")
        };
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("stations", self.band.station_count().to_string());
        kv("offset", hz(self.geom.offset()));
        kv("p_over_pj_db", format!("{:?}", self.p_over_pj_db));
        kv("eb_n0_db", list(&self.eb_n0_grid_db, ""));
        kv("chip_rate", hz(self.dsss.chip_rate()));
        kv("processing_gain", self.dsss.processing_gain().to_string());
        kv("first_station", hz(self.band.first_freq()));
        kv("station_spacing", hz(self.band.spacing()));
        kv("station_std_dev", hz(self.band.shape().std_dev_hz()));
        kv("interference_bandwidth", hz(self.geom.interference_bandwidth()));
        kv("users", self.users.to_string());
        if let Some(g) = &self.offset_grid {
            kv("offset_sweep", list(g, " Hz"));
        }
        kv("samples_per_chip", self.sim.samples_per_chip.to_string());
        kv("target_rel_variance", format!("{:?}", self.sim.target_rel_variance));
        kv("max_bits", self.sim.max_bits.to_string());
        kv("seed", self.sim.seed.to_string());
        kv("fm_message_cutoff", hz(self.sim.fm_message_cutoff));
        s
    }
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ParseError::Syntax { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let key = key.trim();
        let value = value.trim();
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(ParseError::UnknownKey { line, key: key.to_string() });
        }
        if value.is_empty() {
            return Err(ParseError::Value { line, key: key.into(), message: "empty value".into() });
        }
        if let Some(&(first, _)) = entries.get(key) {
            return Err(ParseError::DuplicateKey { line, key: key.into(), first });
        }
        entries.insert(key.to_string(), (line, value.to_string()));
    }

    let missing: Vec<String> =
        REQUIRED.iter().filter(|k| !entries.contains_key(**k)).map(|k| k.to_string()).collect();
    if !missing.is_empty() {
        return Err(ParseError::Missing(missing));
    }

    let get = |key: &str| entries.get(key).map(|(l, v)| (*l, v.as_str()));
    let value_err = |line: usize, key: &str, message: String| ParseError::Value {
        line,
        key: key.to_string(),
        message,
    };
    let parse_with = |key: &str, f: &dyn Fn(&str) -> Result<f64, String>| -> Result<Option<f64>, ParseError> {
        get(key).map(|(l, v)| f(v).map_err(|m| value_err(l, key, m))).transpose()
    };
    let integer = |key: &str| -> Result<Option<u64>, ParseError> {
        get(key)
            .map(|(l, v)| v.parse::<u64>().map_err(|e| value_err(l, key, format!("`{v}`: {e}"))))
            .transpose()
    };

    let stations = integer("stations")?.expect("required") as usize;
    let p_over_pj_db = parse_with("p_over_pj_db", &parse_number)?.expect("required");
    let (grid_line, grid_text) = get("eb_n0_db").expect("required");
    let eb_n0_grid_db = parse_grid(grid_text).map_err(|m| value_err(grid_line, "eb_n0_db", m))?;

    let mut spec = ScenarioSpec::new(stations, 0.0, p_over_pj_db, eb_n0_grid_db);
    if let Some(v) = parse_with("chip_rate", &parse_frequency)? {
        spec.chip_rate = v;
    }
    let chip_rate = spec.chip_rate;
    let offset_value = |s: &str| parse_offset(s, chip_rate);
    spec.offset = parse_with("offset", &offset_value)?.expect("required");
    if let Some(v) = integer("processing_gain")? {
        let (l, _) = get("processing_gain").expect("present");
        spec.processing_gain =
            u32::try_from(v).map_err(|_| value_err(l, "processing_gain", "too large".into()))?;
    }
    if let Some(v) = parse_with("first_station", &parse_frequency)? {
        spec.first_station = v;
    }
    if let Some(v) = parse_with("station_spacing", &parse_frequency)? {
        spec.station_spacing = v;
    }
    if let Some(v) = parse_with("station_std_dev", &parse_frequency)? {
        spec.station_std_dev = v;
    }
    spec.interference_bandwidth = parse_with("interference_bandwidth", &parse_frequency)?;
    if let Some(v) = integer("users")? {
        let (l, _) = get("users").expect("present");
        spec.users = u32::try_from(v).map_err(|_| value_err(l, "users", "too large".into()))?;
    }
    if let Some((l, text)) = get("offset_sweep") {
        let grid = text
            .split(',')
            .map(|s| parse_offset(s.trim(), chip_rate))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| value_err(l, "offset_sweep", m))?;
        spec.offset_grid = Some(grid);
    }
    if let Some(v) = integer("samples_per_chip")? {
        spec.sim.samples_per_chip = v as usize;
    }
    if let Some(v) = parse_with("target_rel_variance", &parse_number)? {
        spec.sim.target_rel_variance = v;
    }
    if let Some(v) = integer("max_bits")? {
        spec.sim.max_bits = v;
    }
    if let Some(v) = integer("seed")? {
        spec.sim.seed = v;
    }
    if let Some(v) = parse_with("fm_message_cutoff", &parse_frequency)? {
        spec.sim.fm_message_cutoff = v;
    }
    spec.build()
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

/// Number with an optional unit suffix; bare numbers are MHz.
pub fn parse_frequency(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(s.len());
    let (number, unit) = s.split_at(split);
    let scale = match unit.trim() {
        "" | "MHz" | "Mcps" => 1e6,
        "Hz" | "cps" => 1.0,
        "kHz" | "kcps" => 1e3,
        "GHz" => 1e9,
        other => return Err(format!("unknown frequency unit `{other}`")),
    };
    Ok(parse_number(number)? * scale)
}

/// Frequency, or a multiple of the chip rate: `fc`, `fc/2`, `-fc`, `1.5*fc`.
pub fn parse_offset(s: &str, chip_rate: f64) -> Result<f64, String> {
    let t = s.trim().replace(' ', "");
    let Some(pos) = t.find("fc") else {
        return parse_frequency(s);
    };
    let (before, after) = (&t[..pos], &t[pos + 2..]);
    let factor = match before {
        "" => 1.0,
        "-" => -1.0,
        b => parse_number(b.strip_suffix('*').ok_or_else(|| format!("cannot read `{s}`"))?)?,
    };
    let divisor = match after {
        "" => 1.0,
        a => {
            let d = parse_number(a.strip_prefix('/').ok_or_else(|| format!("cannot read `{s}`"))?)?;
            if d == 0.0 {
                return Err("division by zero".into());
            }
            d
        }
    };
    Ok(factor * chip_rate / divisor)
}

/// `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if s.contains(':') {
        let parts: Vec<_> = s.split(':').map(|p| parse_number(p.trim())).collect::<Result<_, _>>()?;
        let [start, step, stop] = parts[..] else {
            return Err(format!("range `{s}` must be start:step:stop"));
        };
        if !(step > 0.0) || stop < start {
            return Err(format!("range `{s}` needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("range `{s}` has too many points"));
        }
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(|p| parse_number(p.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_units() {
        assert_eq!(parse_frequency("10"), Ok(10e6));
        assert_eq!(parse_frequency("500 kHz"), Ok(500e3));
        assert_eq!(parse_frequency("96970 Hz"), Ok(96970.0));
        assert_eq!(parse_frequency("1e1 Mcps"), Ok(10e6));
        assert!(parse_frequency("3 parsecs").is_err());
    }

    #[test]
    fn offsets() {
        assert_eq!(parse_offset("fc/2", 10e6), Ok(5e6));
        assert_eq!(parse_offset("fc", 5e6), Ok(5e6));
        assert_eq!(parse_offset("-fc", 5e6), Ok(-5e6));
        assert_eq!(parse_offset("2.5*fc", 1e6), Ok(2.5e6));
        assert_eq!(parse_offset("5", 10e6), Ok(5e6));
        assert!(parse_offset("fc/0", 1e6).is_err());
        assert!(parse_offset("2fc", 1e6).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3"), Ok(vec![0.0, 1.0, 2.0, 3.0]));
        assert_eq!(parse_grid("0, 3, 6"), Ok(vec![0.0, 3.0, 6.0]));
        assert_eq!(parse_grid("0:0.5:1").unwrap().len(), 3);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("3:1:0").is_err());
    }

    #[test]
    fn forty_station_config() {
        let s = parse_scenario(
            "stations = 40\noffset = 0\nchip_rate = 10 Mcps\ninterference_bandwidth = 20\n\
             p_over_pj_db = 0\neb_n0_db = 0:1:12\n",
        )
        .unwrap();
        assert_eq!(s.band.station_count(), 40);
        assert_eq!(s.geom.offset(), 0.0);
        assert_eq!(s.geom.interference_bandwidth(), 20e6);
        assert_eq!(s.dsss.processing_gain(), 50);
        assert_eq!(s.band.spacing(), 0.5e6);
        assert_eq!(s.band.shape().std_dev_hz(), 0.09697e6);
        assert_eq!(s.eb_n0_grid_db.len(), 13);
        assert_eq!(s.dsss.carrier_freq(), s.band.center());
    }

    #[test]
    fn ten_station_half_chip_offset_config() {
        let s = parse_scenario(
            "stations = 10\noffset = fc/2\nchip_rate = 10\nstation_spacing = 500 kHz\n\
             p_over_pj_db = 0\neb_n0_db = 0, 2, 4\n",
        )
        .unwrap();
        assert_eq!(s.geom.offset(), 5e6);
        assert_eq!(s.geom.interference_bandwidth(), 5e6);
    }

    #[test]
    fn empty_file_lists_every_required_key() {
        let err = parse_scenario("# nothing here\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Missing(REQUIRED.iter().map(|s| s.to_string()).collect())
        );
        assert!(err.to_string().contains("stations, offset, p_over_pj_db, eb_n0_db"));
    }

    #[test]
    fn line_numbers_in_errors() {
        let base = "stations = 4\noffset = 0\np_over_pj_db = 0\neb_n0_db = 0\n";
        let err = parse_scenario(&format!("{base}colour = blue\n")).unwrap_err();
        assert_eq!(err, ParseError::UnknownKey { line: 5, key: "colour".into() });
        let err = parse_scenario(&format!("{base}stations = 5\n")).unwrap_err();
        assert!(matches!(err, ParseError::DuplicateKey { line: 5, first: 1, .. }));
        let err = parse_scenario(&format!("{base}chip_rate = fast\n")).unwrap_err();
        assert!(matches!(err, ParseError::Value { line: 5, .. }));
        let err = parse_scenario("stations 4\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
    }

    #[test]
    fn window_narrower_than_band_is_rejected() {
        let err = parse_scenario(
            "stations = 40\noffset = 0\ninterference_bandwidth = 5\np_over_pj_db = 0\neb_n0_db = 0\n",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Inconsistent(_)));
    }

    #[test]
    fn grid_must_increase() {
        let err = parse_scenario("stations = 1\noffset = 0\np_over_pj_db = 0\neb_n0_db = 3, 1\n")
            .unwrap_err();
        assert!(matches!(err, ParseError::Inconsistent(_)));
    }

    #[test]
    fn serialization_round_trip() {
        let mut spec = ScenarioSpec::new(12, 1.25e6, -7.5, vec![0.0, 0.1, 2.7]);
        spec.offset_grid = Some(vec![0.0, 2.5e6]);
        spec.users = 4;
        spec.sim.seed = 99;
        let s = spec.build().unwrap();
        assert_eq!(parse_scenario(&s.to_config_string()).unwrap(), s);
    }
}
