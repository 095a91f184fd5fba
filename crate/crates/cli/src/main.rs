use std::path::PathBuf;
use std::process::ExitCode;

use bipolar_core::runner::{load_config, run_experiment, ExperimentConfig};
use bipolar_core::Error;
use clap::Parser;

/// Runs one experiment of the bipolar fluid lab and writes its CSV tables,
/// report and manifest.
#[derive(Debug, Parser)]
#[command(name = "bipolar-lab", version)]
struct Cli {
    /// fbm-sample, kernel-check, lemma2, ttv-divergence, conv-var,
    /// fou-ergodic, solve, pullback or verify-all
    experiment: String,
    /// TOML file with configuration keys; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    hurst: Option<f64>,
    /// Modes per axis
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(p) => load_config(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.hurst {
            c.hurst = v;
        }
        if let Some(v) = self.modes {
            c.modes = v;
        }
        if let Some(v) = self.dt {
            c.dt = v;
        }
        if let Some(v) = self.t_final {
            c.t_final = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = cli.config().and_then(|c| run_experiment(&cli.experiment, &c));
    match outcome {
        Ok(run) => {
            for r in &run.reports {
                for c in &r.checks {
                    println!("{:<16} {:<4} {}: {}", r.experiment, if c.pass { "ok" } else { "FAIL" }, c.name, c.detail);
                }
                for f in &r.findings {
                    println!("{:<16} note {f}", r.experiment);
                }
            }
            println!("manifest: {}", run.manifest_path.display());
            ExitCode::from(run.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Parse { .. } | Error::Usage(_) | Error::Io { .. } | Error::Domain(_) => {
                    ExitCode::from(1)
                }
                Error::Numerical { .. } | Error::Json(_) => ExitCode::from(2),
            }
        }
    }
}
