//! CSV / JSON rendering of ledgers and state series.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use super::run::{RunOutput, Summary};
use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::thermo::{LedgerMeta, ThermoLedger, ThermoSample};

pub const CSV_HEADER: &str = "t,p1,p2,U,S,dQ_new,dW_new,Q_new,W_new,Q_alicki,W_alicki,residual_new,residual_alicki";
pub const STATES_HEADER: &str = "t,rho_ee,rho_eg_re,rho_eg_im";

/// Formats `x` with 12 significant digits: positional notation for
/// `1e-4 <= |x| < 1e12`, exponent notation otherwise, and
/// `0.000000000000` for zero.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000".to_string();
    }
    let magnitude = x.abs();
    if (1e-4..1e12).contains(&magnitude) {
        let exponent = magnitude.log10().floor() as i32;
        let decimals = (11 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// One CSV row; the JSON mirror uses the same field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "dQ_new")]
    pub dq_new: f64,
    #[serde(rename = "dW_new")]
    pub dw_new: f64,
    #[serde(rename = "Q_new")]
    pub q_new: f64,
    #[serde(rename = "W_new")]
    pub w_new: f64,
    #[serde(rename = "Q_alicki")]
    pub q_alicki: f64,
    #[serde(rename = "W_alicki")]
    pub w_alicki: f64,
    pub residual_new: f64,
    pub residual_alicki: f64,
}

impl From<&ThermoSample> for Row {
    fn from(s: &ThermoSample) -> Self {
        Row {
            t: s.t,
            p1: s.probabilities.first().copied().unwrap_or(0.0),
            p2: s.probabilities.get(1).copied().unwrap_or(0.0),
            u: s.internal_energy,
            s: s.entropy,
            dq_new: s.dq_new,
            dw_new: s.dw_new,
            q_new: s.q_new,
            w_new: s.w_new,
            q_alicki: s.q_alicki,
            w_alicki: s.w_alicki,
            residual_new: s.residual_new,
            residual_alicki: s.residual_alicki,
        }
    }
}

impl Row {
    fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.p1,
            self.p2,
            self.u,
            self.s,
            self.dq_new,
            self.dw_new,
            self.q_new,
            self.w_new,
            self.q_alicki,
            self.w_alicki,
            self.residual_new,
            self.residual_alicki,
        ]
    }
}

fn units_comment(meta: &LedgerMeta) -> String {
    let clock = if meta.scenario == "two-qubit" { "g" } else { "gamma" };
    format!(
        "# qthermo scenario={} subsystem={} frame={} steps={}; t is time with hbar=1 \
         (equals {clock}*t for {clock}=1); U,Q,W in units of hbar*omega0 at omega0=1 \
         (absolute, hbar=1, omega0={}); S in nats; p1,p2 are eigenvalues by branch label",
        meta.scenario, meta.subsystem, meta.frame, meta.steps, meta.omega0
    )
}

pub fn render_csv(ledger: &ThermoLedger) -> String {
    let mut out = String::new();
    out.push_str(&units_comment(&ledger.meta));
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for sample in &ledger.samples {
        let row: Vec<String> = Row::from(sample).values().iter().map(|&v| format_value(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonLedger<'a> {
    units: String,
    meta: &'a LedgerMeta,
    rows: Vec<Row>,
}

pub fn render_json(ledger: &ThermoLedger) -> String {
    let doc = JsonLedger {
        units: units_comment(&ledger.meta).trim_start_matches("# ").to_string(),
        meta: &ledger.meta,
        rows: ledger.samples.iter().map(Row::from).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("ledger serializes");
    s.push('\n');
    s
}

pub fn render_states_csv(times: impl Iterator<Item = f64>, states: &[DensityMatrix]) -> String {
    let mut out = String::from(STATES_HEADER);
    out.push('\n');
    for (t, rho) in times.zip(states) {
        let m = rho.matrix();
        let cells = [t, m[(0, 0)].re, m[(0, 1)].re, m[(0, 1)].im].map(format_value);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_summary(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn render_ledger(ledger: &ThermoLedger, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(ledger),
        OutputFormat::Json => render_json(ledger),
    }
}

/// `dir/run.csv` + `"B"` -> `dir/run.B.csv`
fn sibling(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)
}

/// Writes the ledger to `path`, plus `<stem>.B.<ext>` for the second qubit,
/// `<stem>.states.csv` and `<stem>.summary.json`. Returns every path written.
pub fn emit_series(output: &RunOutput, path: &Path) -> Result<Vec<PathBuf>> {
    let cfg = &output.summary.config;
    let ext = match cfg.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let mut written = Vec::new();

    write_file(path, &render_ledger(&output.ledger, cfg.format))?;
    written.push(path.to_path_buf());

    if let Some(b) = &output.ledger_b {
        let p = sibling(path, "B", ext);
        write_file(&p, &render_ledger(b, cfg.format))?;
        written.push(p);
    }

    let p = sibling(path, "states", "csv");
    write_file(&p, &render_states_csv(cfg.grid.times(), &output.states))?;
    written.push(p);

    let p = sibling(path, "summary", "json");
    write_file(&p, &render_summary(&output.summary))?;
    written.push(p);

    Ok(written)
}
