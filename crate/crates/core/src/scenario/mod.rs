//! Runnable scenarios: configuration, execution, and output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Definitions, OutputFormat, ScenarioConfig, ScenarioKind};
pub use output::{emit_series, format_value, CSV_HEADER};
pub use run::{flags, run, run_dissipative, run_two_qubit, RunOutput, Summary};
