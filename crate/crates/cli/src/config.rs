//! Resolved, validated run configuration. Everything that affects the numbers
//! in an output file lives here and is embedded in that file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ulad_core::detectors::DetectorKind;
use ulad_core::mc::ExperimentPlan;
use ulad_core::signal::{
    db_to_linear, Hypothesis, NoiseParams, PhasePolicy, SignalKind, SignalSpec,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sense,
    Roc,
    PdVsSnr,
    TotalError,
    Table2,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sense => "sense",
            Command::Roc => "roc",
            Command::PdVsSnr => "pd-vs-snr",
            Command::TotalError => "total-error",
            Command::Table2 => "table2",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub noise_var: f64,
    pub snr_db: f64,
    pub signal: SignalKind,
    pub sine_freq: f64,
    pub detector: DetectorKind,
    pub pf: Option<f64>,
    pub gamma: Option<f64>,
    pub zeta_pf: f64,
    pub trials: usize,
    pub calib_trials: usize,
    pub chunk_size: usize,
    pub seed: u64,
    pub k_max: usize,
    pub pf_grid: Option<Vec<f64>>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub gamma_grid: Option<Vec<f64>>,
    /// Sample file for `sense`; a block is generated when absent.
    pub input: Option<PathBuf>,
    /// Hypothesis used to generate the `sense` block.
    pub truth: Option<Hypothesis>,
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

fn check_grid(name: &str, grid: &Option<Vec<f64>>) -> Result<()> {
    if let Some(g) = grid {
        if g.is_empty() {
            return Err(CliError::config(format!("{name} must not be empty")));
        }
        if let Some(bad) = g.iter().find(|v| !v.is_finite()) {
            return Err(CliError::config(format!(
                "{name} contains non-finite value {bad}"
            )));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn noise(&self) -> Result<NoiseParams> {
        Ok(NoiseParams::new(self.noise_var)?)
    }

    /// Signal model at `snr_db`.
    pub fn signal_at(&self, snr_db: f64) -> Result<SignalSpec> {
        let rho = db_to_linear(snr_db);
        let spec = SignalSpec::new(self.signal, rho)?;
        Ok(match self.signal {
            SignalKind::SineSingleCarrier => {
                spec.with_sine(self.sine_freq, PhasePolicy::RandomUniformPerBlock)?
            }
            _ => spec,
        })
    }

    pub fn plan(&self) -> Result<ExperimentPlan> {
        let mut plan = ExperimentPlan::new(
            self.noise()?,
            self.signal_at(self.snr_db)?,
            self.n,
            self.detector,
            self.seed,
        )
        .with_trials(self.trials)
        .with_calib_trials(self.calib_trials);
        plan.chunk_size = self.chunk_size;
        plan.target_pf = self.pf;
        plan.gamma_override = self.gamma;
        plan.rho_grid_db = self.snr_grid_db.clone();
        plan.gamma_grid = self.gamma_grid.clone();
        plan.validate()?;
        Ok(plan)
    }

    /// Checks every parameter before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(CliError::config("n must be >= 1"));
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return Err(CliError::config(format!(
                "noise variance must be finite and > 0, got {}",
                self.noise_var
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(CliError::config("snr-db must be finite"));
        }
        if self.trials == 0 || self.calib_trials == 0 || self.chunk_size == 0 {
            return Err(CliError::config(
                "trial, calibration and chunk counts must be >= 1",
            ));
        }
        if self.k_max == 0 {
            return Err(CliError::config("k-max must be >= 1"));
        }
        check_open_unit("zeta-pf", self.zeta_pf)?;
        if let Some(pf) = self.pf {
            check_open_unit("pf", pf)?;
        }
        if let Some(g) = self.gamma {
            if !g.is_finite() {
                return Err(CliError::config("gamma must be finite"));
            }
        }
        check_grid("pf grid", &self.pf_grid)?;
        check_grid("snr grid", &self.snr_grid_db)?;
        check_grid("gamma grid", &self.gamma_grid)?;
        if let Some(g) = &self.pf_grid {
            for &pf in g {
                check_open_unit("pf grid value", pf)?;
            }
        }
        self.detector.validate()?;
        self.plan()?;

        let needs_calibration = self.detector != DetectorKind::Ulad;
        let min_pf = match self.command {
            Command::Roc => self
                .pf_grid
                .as_ref()
                .and_then(|g| g.iter().copied().reduce(f64::min)),
            Command::PdVsSnr | Command::Calibrate => self.pf,
            _ => None,
        };
        if let (true, Some(pf)) = (needs_calibration, min_pf) {
            if (self.calib_trials as f64) < 1.0 / pf {
                return Err(CliError::config(format!(
                    "calibrating {} at pf {pf} needs at least {} calibration trials",
                    self.detector,
                    (1.0 / pf).ceil()
                )));
            }
        }

        match self.command {
            Command::Sense => {
                if self.detector != DetectorKind::Ulad {
                    return Err(CliError::config("sense runs the ULAD detector only"));
                }
                if self.pf.is_none() {
                    return Err(CliError::config("sense needs --pf"));
                }
                if self.gamma.is_some() {
                    return Err(CliError::config(
                        "sense derives its threshold from --pf; --gamma is not accepted",
                    ));
                }
                if self.input.is_some() && self.truth.is_some() {
                    return Err(CliError::config("give either --input or --truth, not both"));
                }
            }
            Command::PdVsSnr => {
                if self.pf.is_some() == self.gamma.is_some() {
                    return Err(CliError::config(
                        "pd-vs-snr needs exactly one of --pf or --gamma",
                    ));
                }
            }
            Command::Calibrate => {
                if self.pf.is_none() {
                    return Err(CliError::config("calibrate needs --pf"));
                }
            }
            Command::Roc | Command::TotalError | Command::Table2 => {}
        }
        Ok(())
    }
}
