//! Configuration, experiment drivers and run records.
//!
//! Each experiment writes CSV tables and a `report.json` with its checks and
//! findings under `<out>/<experiment>/`, followed by a manifest listing every
//! output with its SHA-256.

mod config;
mod experiments;
mod output;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use experiments::{run_experiment, Check, Experiment, Report, RunOutcome};
pub use output::{read_manifest, OutputDir, OutputFile, RunManifest};
