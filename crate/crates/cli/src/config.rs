//! Flat `section.key = value` run configuration.
//!
//! ```text
//! # comment
//! qubit.e_c_ghz = 2.5
//! qubit.flux_phi = pi
//! sweep.n_max = 200
//! ```
//!
//! Unknown keys, duplicates and malformed values are errors that name the
//! offending line and key.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use fluxopt_core::spectrum::{PhaseGrid, DEFAULT_STEPS_PER_PERIOD};
use fluxopt_core::{NoiseSpec, QubitSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub n_values: Vec<usize>,
    pub n_max: usize,
    pub scan_points: usize,
    /// Ground capacitances as fractions of the array junction capacitance.
    pub cd_a_over_ca: f64,
    pub cd_b_over_ca: f64,
    pub scan_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub qubit: QubitSpec,
    pub noise: NoiseSpec,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub theta_max: Option<f64>,
    pub steps_per_period: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub summary_path: Option<PathBuf>,
    pub derive_n_values: Vec<usize>,
    pub dump_path: Option<PathBuf>,
    pub dump_points: usize,
    pub oracle: OracleConfig,
}

const KEYS: &[&str] = &[
    "qubit.e_c_ghz",
    "qubit.e_j_ghz",
    "qubit.e_l_ghz",
    "qubit.flux_phi",
    "qubit.lambda",
    "qubit.cd_ratio",
    "noise.a_low_e",
    "noise.a_high_e_per_sqrthz",
    "sweep.n_min",
    "sweep.n_max",
    "solver.theta_max",
    "solver.steps_per_period",
    "output.path",
    "output.format",
    "output.summary_path",
    "derive.n_values",
    "spectrum.dump_path",
    "spectrum.dump_points",
    "oracle.n_values",
    "oracle.n_max",
    "oracle.scan_points",
    "oracle.cd_a_over_ca",
    "oracle.cd_b_over_ca",
    "oracle.scan_path",
];

/// Parse a real number, also accepting `pi`, `2pi`, `0.5*pi`, `pi/2` and
/// `2/pi`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.to_ascii_lowercase();
    let value = if let Some((num, den)) = t.split_once('/') {
        let a = parse_real(num)?;
        let b = parse_real(den)?;
        if b == 0.0 {
            return Err(format!("division by zero in `{text}`"));
        }
        a / b
    } else if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        match coef {
            "" => PI,
            "-" => -PI,
            c => {
                c.parse::<f64>()
                    .map_err(|_| format!("not a number: `{text}`"))?
                    * PI
            }
        }
    } else {
        t.parse::<f64>()
            .map_err(|_| format!("not a number: `{text}`"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not finite: `{text}`"))
    }
}

fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| format!("not a non-negative integer: `{s}`"))
        })
        .collect()
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|(line, v)| parse_real(v).map_err(|e| ConfigError::at(line, key, e)))
            .transpose()
    }

    fn required_real(&self, key: &str) -> Result<f64, ConfigError> {
        self.real(key)?
            .ok_or_else(|| ConfigError::key(key, "required key is missing"))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|(line, v)| {
                v.parse::<usize>().map_err(|_| {
                    ConfigError::at(line, key, format!("not a non-negative integer: `{v}`"))
                })
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<usize>>, ConfigError> {
        self.get(key)
            .map(|(line, v)| parse_list(v).map_err(|e| ConfigError::at(line, key, e)))
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|(_, v)| PathBuf::from(v))
    }

    /// Attribute a core validation failure to the key's line.
    fn attribute<T, E: fmt::Display>(&self, key: &str, r: Result<T, E>) -> Result<T, ConfigError> {
        r.map_err(|e| match self.get(key) {
            Some((line, _)) => ConfigError::at(line, key, e.to_string()),
            None => ConfigError::key(key, e.to_string()),
        })
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    key: None,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::at(line, key, "unknown key"));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, key, "empty value"));
            }
            if let Some((first, _)) = map.get(key) {
                return Err(ConfigError::at(
                    line,
                    key,
                    format!("duplicate; first set on line {first}"),
                ));
            }
            map.insert(key.to_string(), (line, value.to_string()));
        }
        let e = Entries { map };

        let qubit = e.attribute(
            "qubit.e_c_ghz",
            QubitSpec::new(
                e.required_real("qubit.e_c_ghz")?,
                e.required_real("qubit.e_j_ghz")?,
                e.required_real("qubit.e_l_ghz")?,
            ),
        )?;
        let qubit = match e.real("qubit.flux_phi")? {
            Some(phi) => e.attribute("qubit.flux_phi", qubit.with_flux(phi))?,
            None => qubit,
        };
        let qubit = match e.real("qubit.lambda")? {
            Some(l) => e.attribute("qubit.lambda", qubit.with_lambda(l))?,
            None => qubit,
        };
        let cd_ratio = e.real("qubit.cd_ratio")?.unwrap_or(1.0);
        let qubit = e.attribute("qubit.cd_ratio", qubit.with_cd_ratio(cd_ratio))?;

        let a_low = e
            .real("noise.a_low_e")?
            .unwrap_or(fluxopt_core::noise::DEFAULT_A_LOW);
        let a_high = e
            .real("noise.a_high_e_per_sqrthz")?
            .unwrap_or(fluxopt_core::noise::DEFAULT_A_HIGH);
        let noise = e.attribute("noise.a_low_e", NoiseSpec::new(a_low, a_high, cd_ratio))?;

        let n_min = e.count("sweep.n_min")?;
        let n_max = e.count("sweep.n_max")?;
        if n_min == Some(0) {
            return Err(e
                .attribute::<(), _>("sweep.n_min", Err("must be at least 1"))
                .unwrap_err());
        }
        if let (Some(lo), Some(hi)) = (n_min, n_max) {
            if hi < lo {
                return Err(e
                    .attribute::<(), _>(
                        "sweep.n_max",
                        Err(format!("{hi} is below sweep.n_min = {lo}")),
                    )
                    .unwrap_err());
            }
        }

        let theta_max = e.real("solver.theta_max")?;
        let steps_per_period = e.count("solver.steps_per_period")?;
        let format = e
            .get("output.format")
            .map(|(line, v)| {
                v.parse::<Format>()
                    .map_err(|m| ConfigError::at(line, "output.format", m))
            })
            .transpose()?;

        let oracle_n = e.list("oracle.n_values")?.unwrap_or_else(|| vec![2, 3]);
        if let Some(&bad) = oracle_n
            .iter()
            .find(|&&n| !(1..=fluxopt_core::oracle::MAX_JUNCTIONS).contains(&n))
        {
            return Err(e
                .attribute::<(), _>(
                    "oracle.n_values",
                    Err(format!(
                        "N = {bad} outside 1..={}",
                        fluxopt_core::oracle::MAX_JUNCTIONS
                    )),
                )
                .unwrap_err());
        }
        let oracle_n_max = e
            .count("oracle.n_max")?
            .unwrap_or(fluxopt_core::oracle::MAX_CHARGE_CUTOFF);
        if !(3..=fluxopt_core::oracle::MAX_CHARGE_CUTOFF).contains(&oracle_n_max) {
            return Err(e
                .attribute::<(), _>(
                    "oracle.n_max",
                    Err(format!(
                        "must lie in 3..={}",
                        fluxopt_core::oracle::MAX_CHARGE_CUTOFF
                    )),
                )
                .unwrap_err());
        }
        let scan_points = e.count("oracle.scan_points")?.unwrap_or(17);
        if scan_points < 3 {
            return Err(e
                .attribute::<(), _>("oracle.scan_points", Err("need at least 3"))
                .unwrap_err());
        }
        let cd_a_over_ca = e.real("oracle.cd_a_over_ca")?.unwrap_or(0.0);
        let cd_b_over_ca = e.real("oracle.cd_b_over_ca")?.unwrap_or(0.0);
        for (key, v) in [
            ("oracle.cd_a_over_ca", cd_a_over_ca),
            ("oracle.cd_b_over_ca", cd_b_over_ca),
        ] {
            if v < 0.0 {
                return Err(e.attribute::<(), _>(key, Err("must be ≥ 0")).unwrap_err());
            }
        }

        let cfg = RunConfig {
            qubit,
            noise,
            n_min,
            n_max,
            theta_max,
            steps_per_period,
            output_path: e.path("output.path"),
            format,
            summary_path: e.path("output.summary_path"),
            derive_n_values: e
                .list("derive.n_values")?
                .unwrap_or_else(|| vec![2, 10, 20, 50, 100]),
            dump_path: e.path("spectrum.dump_path"),
            dump_points: e.count("spectrum.dump_points")?.unwrap_or(2001),
            oracle: OracleConfig {
                n_values: oracle_n,
                n_max: oracle_n_max,
                scan_points,
                cd_a_over_ca,
                cd_b_over_ca,
                scan_path: e.path("oracle.scan_path"),
            },
        };
        if cfg.derive_n_values.contains(&0) {
            return Err(e
                .attribute::<(), _>("derive.n_values", Err("junction counts must be at least 1"))
                .unwrap_err());
        }
        cfg.grid().map_err(|m| {
            let key = if steps_per_period.is_some() {
                "solver.steps_per_period"
            } else {
                "solver.theta_max"
            };
            e.attribute::<(), _>(key, Err(m)).unwrap_err()
        })?;
        Ok(cfg)
    }

    /// Override λ, keeping every other field.
    pub fn set_lambda(&mut self, lambda: f64) -> Result<(), ConfigError> {
        self.qubit = self
            .qubit
            .with_lambda(lambda)
            .map_err(|e| ConfigError::key("qubit.lambda", e.to_string()))?;
        Ok(())
    }

    /// Starting grid: the automatic one unless the solver section overrides it.
    pub fn grid(&self) -> Result<PhaseGrid, String> {
        if self.theta_max.is_none() && self.steps_per_period.is_none() {
            return Ok(PhaseGrid::auto(&self.qubit));
        }
        let auto = PhaseGrid::auto(&self.qubit);
        PhaseGrid::new(
            self.theta_max.unwrap_or(auto.theta_max()),
            self.steps_per_period.unwrap_or(DEFAULT_STEPS_PER_PERIOD),
        )
        .map_err(|e| e.to_string())
    }
}
