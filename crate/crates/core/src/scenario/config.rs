//! Run configuration, assembled from documented defaults, an optional
//! `key = value` file, and command-line flags (later layers win).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DispersiveParams, Frame, LindbladParams, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::states::DensityMatrix;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Two dispersively coupled qubits.
    TwoQubit,
    /// One qubit damped by a thermal bath.
    Dissipative,
}

impl ScenarioKind {
    pub fn default_grid(self) -> TimeGrid {
        match self {
            ScenarioKind::TwoQubit => TimeGrid { t_max: PI, steps: 2000 },
            ScenarioKind::Dissipative => TimeGrid { t_max: 5.0, steps: 5000 },
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-qubit" => Ok(ScenarioKind::TwoQubit),
            "dissipative" => Ok(ScenarioKind::Dissipative),
            _ => Err(Error::Config(format!("unknown scenario `{s}` (expected two-qubit|dissipative)"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::TwoQubit => "two-qubit",
            ScenarioKind::Dissipative => "dissipative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definitions {
    New,
    Alicki,
    #[default]
    Both,
}

impl Definitions {
    pub fn includes_new(self) -> bool {
        matches!(self, Definitions::New | Definitions::Both)
    }

    pub fn includes_alicki(self) -> bool {
        matches!(self, Definitions::Alicki | Definitions::Both)
    }
}

impl FromStr for Definitions {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Definitions::New),
            "alicki" => Ok(Definitions::Alicki),
            "both" => Ok(Definitions::Both),
            _ => Err(Error::Config(format!("unknown definitions `{s}` (expected new|alicki|both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (expected csv|json)"))),
        }
    }
}

/// Everything needed to reproduce one run.
///
/// `p` and `c` parametrize the initial qubit state `[[p, c], [conj c, 1 - p]]`:
/// qubit A for the two-qubit scenario, the damped qubit otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub omega0: f64,
    pub g: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub p: f64,
    pub c: C64,
    pub grid: TimeGrid,
    pub frame: Frame,
    pub definitions: Definitions,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub crosscheck: bool,
    pub tolerances: Tolerances,
}

/// Keys accepted in config files and as `--flag` names (with `-` for `_`).
pub const KEYS: &[&str] = &[
    "scenario",
    "p",
    "c",
    "g",
    "omega0",
    "gamma",
    "nbar",
    "t_max",
    "steps",
    "frame",
    "definitions",
    "out",
    "format",
    "crosscheck",
];

impl ScenarioConfig {
    pub fn defaults(scenario: ScenarioKind) -> Self {
        ScenarioConfig {
            scenario,
            omega0: 1.0,
            g: 1.0,
            gamma: 1.0,
            nbar: 0.0,
            p: 0.5,
            c: C64::new(0.5, 0.0),
            grid: scenario.default_grid(),
            frame: Frame::Interaction,
            definitions: Definitions::Both,
            out: None,
            format: OutputFormat::Csv,
            crosscheck: false,
            tolerances: Tolerances::default(),
        }
    }

    /// Applies `key -> value` overrides on top of the defaults for `scenario`
    /// and validates the result.
    pub fn from_pairs(scenario: ScenarioKind, pairs: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::defaults(scenario);
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('-', "_");
        let value = value.trim();
        if let Some(name) = key.strip_prefix("tol.") {
            let v = parse_f64(&key, value)?;
            return self.tolerances.set(name, v).map_err(Error::Config);
        }
        match key.as_str() {
            "scenario" => {
                let kind: ScenarioKind = value.parse()?;
                if kind != self.scenario {
                    return Err(Error::Config(format!(
                        "scenario `{kind}` in config conflicts with requested `{}`",
                        self.scenario
                    )));
                }
            }
            "p" => self.p = parse_f64(&key, value)?,
            "c" => {
                self.c = C64::from_str(value)
                    .map_err(|_| Error::Config(format!("invalid complex value for c: `{value}`")))?
            }
            "g" => self.g = parse_f64(&key, value)?,
            "omega0" => self.omega0 = parse_f64(&key, value)?,
            "gamma" => self.gamma = parse_f64(&key, value)?,
            "nbar" => self.nbar = parse_f64(&key, value)?,
            "t_max" => self.grid.t_max = parse_f64(&key, value)?,
            "steps" => {
                self.grid.steps = value
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid integer for steps: `{value}`")))?
            }
            "frame" => self.frame = value.parse()?,
            "definitions" => self.definitions = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "crosscheck" => self.crosscheck = parse_bool(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.steps < 2 {
            return Err(Error::InvalidParameter(format!("steps = {} must be at least 2", self.grid.steps)));
        }
        TimeGrid::new(self.grid.t_max, self.grid.steps)?;
        self.dispersive_params().validate()?;
        if self.scenario == ScenarioKind::Dissipative {
            self.lindblad_params().validate()?;
        }
        Ok(())
    }

    pub fn dispersive_params(&self) -> DispersiveParams {
        DispersiveParams { omega0: self.omega0, g: self.g, p: self.p, c: self.c, frame: self.frame }
    }

    pub fn lindblad_params(&self) -> LindbladParams {
        LindbladParams { gamma: self.gamma, nbar: self.nbar, omega0: self.omega0 }
    }

    pub fn initial_qubit(&self) -> Result<DensityMatrix> {
        DensityMatrix::qubit(self.p, self.c)
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("invalid number for {key}: `{value}`")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("{key} must be finite")));
    }
    Ok(v)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean for {key}: `{value}`"))),
    }
}

/// Parses `key = value` lines; `#` starts a comment. Duplicate keys are an error.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().replace('-', "_");
        let known = KEYS.contains(&key.as_str()) || key.starts_with("tol.");
        if !known {
            return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn read_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_kv(&text)
}

/// Expands a sweep file into one config per point of the Cartesian product
/// of its comma-separated values. `scenario` and `out` are required; run `k`
/// writes to `<out stem>_<k>.<ext>`.
pub fn expand_sweep(pairs: &BTreeMap<String, String>) -> Result<Vec<ScenarioConfig>> {
    let scenario: ScenarioKind = pairs
        .get("scenario")
        .ok_or_else(|| Error::Config("sweep file needs a `scenario` key".into()))?
        .parse()?;
    let out = PathBuf::from(
        pairs.get("out").ok_or_else(|| Error::Config("sweep file needs an `out` key".into()))?,
    );

    let axes: Vec<(String, Vec<String>)> = pairs
        .iter()
        .filter(|(k, _)| k.as_str() != "out")
        .map(|(k, v)| (k.clone(), v.split(',').map(|s| s.trim().to_string()).collect()))
        .collect();

    let mut combos: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for (key, values) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut next = base.clone();
                    next.insert(key.clone(), v.clone());
                    next
                })
            })
            .collect();
    }

    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    let ext = out.extension().map(|s| s.to_string_lossy().into_owned());
    combos
        .into_iter()
        .enumerate()
        .map(|(k, mut combo)| {
            let name = match &ext {
                Some(e) => format!("{stem}_{k}.{e}"),
                None => format!("{stem}_{k}"),
            };
            combo.insert("out".into(), out.with_file_name(name).to_string_lossy().into_owned());
            ScenarioConfig::from_pairs(scenario, &combo)
        })
        .collect()
}
