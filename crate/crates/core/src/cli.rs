//! `qthermo` command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::config::{expand_sweep, read_kv_file};
use crate::scenario::output::{emit_series, render_ledger};
use crate::scenario::{run, RunOutput, ScenarioConfig, ScenarioKind};

#[derive(Debug, Parser)]
#[command(name = "qthermo", version, about = "Heat/work/entropy trajectories for open and closed qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single scenario (two-qubit | dissipative).
    Run(Box<RunArgs>),
    /// Run every combination listed in a sweep file.
    Sweep {
        /// `key = value` file; comma-separated values span the sweep.
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// two-qubit | dissipative
    scenario: String,
    /// `key = value` file applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Excited population of the initial qubit.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Initial coherence, e.g. `0.5` or `0.3-0.1i`.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nbar: Option<String>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    t_max: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// interaction | lab
    #[arg(long)]
    frame: Option<String>,
    /// new | alicki | both
    #[arg(long)]
    definitions: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Cross-check the exact solution against RK4.
    #[arg(long)]
    crosscheck: bool,
}

impl RunArgs {
    fn overrides(&self) -> BTreeMap<String, String> {
        let flags = [
            ("p", &self.p),
            ("c", &self.c),
            ("g", &self.g),
            ("omega0", &self.omega0),
            ("gamma", &self.gamma),
            ("nbar", &self.nbar),
            ("t_max", &self.t_max),
            ("steps", &self.steps),
            ("frame", &self.frame),
            ("definitions", &self.definitions),
            ("out", &self.out),
            ("format", &self.format),
        ];
        let mut out: BTreeMap<String, String> = flags
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if self.crosscheck {
            out.insert("crosscheck".into(), "true".into());
        }
        out
    }
}

#[derive(Debug)]
pub enum Invocation {
    Run(ScenarioConfig),
    Sweep(Vec<ScenarioConfig>),
}

/// Parses command-line arguments (including the program name) into
/// validated configurations. Flags override config-file values, which
/// override the defaults.
pub fn parse_config<I, T>(args: I) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.render().to_string()))?;
    match cli.command {
        Command::Run(run_args) => {
            let scenario: ScenarioKind = run_args.scenario.parse()?;
            let mut pairs = match &run_args.config {
                Some(path) => read_kv_file(path)?,
                None => BTreeMap::new(),
            };
            pairs.extend(run_args.overrides());
            Ok(Invocation::Run(ScenarioConfig::from_pairs(scenario, &pairs)?))
        }
        Command::Sweep { config } => Ok(Invocation::Sweep(expand_sweep(&read_kv_file(&config)?)?)),
    }
}

fn describe(output: &RunOutput) -> String {
    let summary = &output.summary;
    let mut s = format!("scenario {}: flags [{}]", summary.config.scenario, summary.flags.join(", "));
    for (k, v) in &summary.metrics {
        s.push_str(&format!("\n  {k} = {v:.6e}"));
    }
    s
}

fn execute(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let output = run(cfg)?;
    match &cfg.out {
        Some(path) => {
            for p in emit_series(&output, path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(render_ledger(&output.ledger, cfg.format).as_bytes());
        }
    }
    Ok(output)
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on
/// usage/validation errors, 2 on numerical failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&args) {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            return 0;
        }
    }
    let invocation = match parse_config(args) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match invocation {
        Invocation::Run(cfg) => match execute(&cfg) {
            Ok(output) => {
                eprintln!("{}", describe(&output));
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Invocation::Sweep(cfgs) => {
            let results: Vec<Result<RunOutput>> = cfgs.par_iter().map(execute).collect();
            let mut code = 0;
            for (k, (cfg, result)) in cfgs.iter().zip(results).enumerate() {
                let target = cfg.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                match result {
                    Ok(output) => eprintln!("run {k} ({target}): flags [{}]", output.summary.flags.join(", ")),
                    Err(e) => {
                        eprintln!("run {k} ({target}) failed: {e}");
                        code = code.max(e.exit_code());
                    }
                }
            }
            code
        }
    }
}
