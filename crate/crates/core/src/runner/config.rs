use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::HurstParam;
use crate::fluid::FluidParams;

use super::Experiment;

/// Every knob of a run. Keys match the command-line flags with dashes
/// replaced by underscores; missing keys take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub hurst: f64,
    /// Modes per axis, `M_max`.
    pub modes: usize,
    /// Points of the time grid for scalar fBm experiments.
    pub grid_points: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    /// Ensemble size for Monte Carlo estimates.
    pub samples: usize,
    pub out: PathBuf,
    pub c0: f64,
    pub c1: f64,
    /// Upper end of the Lemma 2 and witness scans.
    pub lambda_max: f64,
    /// Longest averaging horizon of the ergodic study.
    pub horizon: f64,
    /// Pullback start times, strictly decreasing.
    pub t0_list: Vec<f64>,
    /// Initial conditions per pullback ensemble.
    pub initial_conditions: usize,
    pub fluid: FluidParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            hurst: 0.35,
            modes: 8,
            grid_points: 64,
            dt: 1.0 / 256.0,
            t_final: 1.0,
            seed: 0,
            samples: 10_000,
            out: PathBuf::from("runs"),
            c0: 1.0,
            c1: 0.5,
            lambda_max: 100.0,
            horizon: 200.0,
            t0_list: vec![-2.0, -4.0, -8.0],
            initial_conditions: 5,
            fluid: FluidParams::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks the fields every experiment needs, then those specific to `experiment`.
    pub fn validate_for(&self, experiment: Experiment) -> Result<()> {
        let mut bad = Vec::new();
        let hurst = HurstParam::new(self.hurst);
        if let Err(e) = &hurst {
            bad.push(format!("hurst: {e}"));
        }
        if self.modes == 0 {
            bad.push("modes: must be at least 1".into());
        }
        if self.grid_points < 2 {
            bad.push(format!("grid_points: need at least 2, got {}", self.grid_points));
        }
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            bad.push(format!("dt: must lie in (0, 1], got {}", self.dt));
        }
        if !(self.t_final > 0.0) {
            bad.push(format!("t_final: must be positive, got {}", self.t_final));
        }
        if self.samples < 2 {
            bad.push(format!("samples: need at least 2, got {}", self.samples));
        }
        if !(self.c0 > 0.0) {
            bad.push(format!("c0: must be positive, got {}", self.c0));
        }
        if !(self.c1 > 0.0) {
            bad.push(format!("c1: must be positive, got {}", self.c1));
        }
        if !(self.lambda_max > 2.0) {
            bad.push(format!("lambda_max: must exceed 2, got {}", self.lambda_max));
        }
        if !(self.horizon > 0.0) {
            bad.push(format!("horizon: must be positive, got {}", self.horizon));
        }
        if self.t0_list.is_empty()
            || self.t0_list.iter().any(|&t| !(t < 0.0))
            || self.t0_list.windows(2).any(|w| !(w[1] < w[0]))
        {
            bad.push("t0_list: must be negative and strictly decreasing".into());
        }
        if self.initial_conditions < 2 {
            bad.push("initial_conditions: need at least 2".into());
        }
        if let Err(Error::Validation(v)) = self.fluid.validate() {
            bad.extend(v.into_iter().map(|m| format!("fluid: {m}")));
        }
        if let Ok(h) = hurst {
            use Experiment::*;
            match experiment {
                KernelCheck if h.value() > 0.5 => {
                    bad.push(format!("hurst: the Volterra kernel is implemented for H <= 1/2, got {}", h.value()))
                }
                Lemma2 if h.value() >= 0.5 => {
                    bad.push(format!("hurst: the Lemma 2 integral needs H < 1/2, got {}", h.value()))
                }
                ConvVar | FouErgodic | Solve | Pullback | VerifyAll => {
                    if let Err(e) = h.require_convolution() {
                        bad.push(format!("hurst: {e}"));
                    }
                }
                _ => {}
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }
}

/// Parses configuration text; an empty text gives the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0);
        Error::Parse {
            line,
            message: e.message().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), ExperimentConfig::default());
        assert_eq!(parse_config("# nothing\n\n").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn reads_values_and_tables() {
        let c = parse_config("hurst = 0.3\nmodes = 4\n[fluid]\nmu0 = 3.0\n").unwrap();
        assert_eq!(c.hurst, 0.3);
        assert_eq!(c.modes, 4);
        assert_eq!(c.fluid.mu0, 3.0);
        assert_eq!(c.fluid.eps, 2.0);
    }

    #[test]
    fn malformed_number_reports_its_line() {
        match parse_config("modes = 4\nhurst = 0.3.5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        match parse_config("\n\nhurts = 0.3\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("hurts"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rough_hurst_fails_convolution_experiments() {
        let c = ExperimentConfig {
            hurst: 0.2,
            ..ExperimentConfig::default()
        };
        match c.validate_for(Experiment::ConvVar) {
            Err(Error::Validation(v)) => assert!(v[0].contains("H > 1/4"), "{v:?}"),
            other => panic!("{other:?}"),
        }
        assert!(c.validate_for(Experiment::FbmSample).is_ok());
    }

    #[test]
    fn lists_every_offending_field() {
        let c = ExperimentConfig {
            dt: -1.0,
            samples: 0,
            t0_list: vec![-1.0, -0.5],
            ..ExperimentConfig::default()
        };
        match c.validate_for(Experiment::Solve) {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }
}
