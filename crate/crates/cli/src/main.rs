//! `ulad`: experiment runner for ULAD spectrum sensing under Laplacian noise.

mod config;
mod error;
mod input;
mod run;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ulad_core::analytic::DEFAULT_K_MAX;
use ulad_core::detectors::DetectorKind;
use ulad_core::mc::{DEFAULT_CALIB_TRIALS, DEFAULT_CHUNK_SIZE, DEFAULT_TRIALS};
use ulad_core::signal::{Hypothesis, SignalKind, DEFAULT_SINE_FREQ};
use ulad_core::threshold::DEFAULT_ZETA_PF;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::table::{render_csv, render_json, Report, CONFIG_PREFIX};

#[derive(Parser, Debug)]
#[command(
    name = "ulad",
    version,
    about = "ULAD spectrum sensing experiments under Laplacian noise"
)]
struct Cli {
    /// Worker threads for Monte Carlo work; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignalArg {
    Bpsk,
    Gauss,
    Sine,
}

impl From<SignalArg> for SignalKind {
    fn from(s: SignalArg) -> Self {
        match s {
            SignalArg::Bpsk => SignalKind::Bpsk,
            SignalArg::Gauss => SignalKind::GaussianIid,
            SignalArg::Sine => SignalKind::SineSingleCarrier,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TruthArg {
    H0,
    H1,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Decide H0/H1 for one block with the ULAD detector at a given Pf.
    Sense {
        #[command(flatten)]
        common: Common,
        /// Sample file: one real per line, `#` comments allowed.
        #[arg(long, conflicts_with = "truth")]
        input: Option<PathBuf>,
        /// Generate the block under this hypothesis instead of reading a file.
        #[arg(long, value_enum)]
        truth: Option<TruthArg>,
    },
    /// Pd against target Pf at one SNR (analytic thresholds for ULAD, calibrated otherwise).
    Roc {
        #[command(flatten)]
        common: Common,
        /// Target Pf values: `a,b,c` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        pf_grid: Option<String>,
    },
    /// Pd across an SNR grid at a fixed threshold.
    PdVsSnr {
        #[command(flatten)]
        common: Common,
        /// SNR values in dB: `a,b,c` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        snr_grid: Option<String>,
    },
    /// Empirical and analytic total error Pf + (1 - Pd) over a threshold grid.
    TotalError {
        #[command(flatten)]
        common: Common,
        /// Thresholds: `a,b,c` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        gamma_grid: Option<String>,
    },
    /// Pf-constrained optimal thresholds (closed form, no simulation).
    Table2 {
        #[command(flatten)]
        common: Common,
        /// SNR values in dB: `a,b,c` or `start:stop:step`.
        #[arg(long, allow_hyphen_values = true)]
        snr_grid: Option<String>,
    },
    /// Empirical H0 threshold for a detector at a target Pf.
    Calibrate {
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the configuration embedded in a previous CSV or JSON output.
    Rerun {
        /// A file written by this tool.
        file: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Samples per block.
    #[arg(long, default_value_t = 1000)]
    n: usize,

    /// Laplacian noise variance (required by `sense`, 1 elsewhere).
    #[arg(long)]
    noise_var: Option<f64>,

    /// Signal power in dB; equals the SNR when the noise variance is 1.
    #[arg(long, default_value_t = -14.0, allow_hyphen_values = true)]
    snr_db: f64,

    #[arg(long, value_enum, default_value_t = SignalArg::Bpsk)]
    signal: SignalArg,

    /// Normalized frequency of the sine carrier, in (0, 0.5).
    #[arg(long, default_value_t = DEFAULT_SINE_FREQ)]
    sine_freq: f64,

    /// ulad, ks, cm, ad, ed, avc or pom.
    #[arg(long, default_value = "ulad")]
    detector: String,

    /// Exponent for the POM detector, in (0, 2).
    #[arg(long)]
    pom_p: Option<f64>,

    /// Target false-alarm probability.
    #[arg(long)]
    pf: Option<f64>,

    /// Fixed detection threshold (pd-vs-snr).
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,

    /// False-alarm ceiling for the optimal threshold.
    #[arg(long, default_value_t = DEFAULT_ZETA_PF)]
    zeta_pf: f64,

    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,

    #[arg(long, default_value_t = DEFAULT_CALIB_TRIALS)]
    calib_trials: usize,

    /// Trials per parallel chunk; part of the reproducibility contract.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    chunk_size: usize,

    #[arg(long, env = "ULAD_SEED", default_value_t = 1)]
    seed: u64,

    /// Terms kept in the dilogarithm series of the exact second moment.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
}

const DEFAULT_PF: f64 = 0.05;

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
fn parse_grid(name: &str, s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("{name}: `{t}` is not a number")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::config(format!(
                "{name}: expected start:stop:step, got `{s}`"
            )));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(CliError::config(format!("{name}: bad range `{s}`")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(CliError::config(format!(
                "{name}: range `{s}` has too many points"
            )));
        }
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

fn detector(common: &Common) -> Result<DetectorKind> {
    let kind: DetectorKind = common
        .detector
        .parse()
        .map_err(|e: ulad_core::Error| CliError::config(e.to_string()))?;
    match (kind, common.pom_p) {
        (DetectorKind::Pom(_), Some(p)) => Ok(DetectorKind::pom(p)?),
        (_, Some(_)) => Err(CliError::config("--pom-p only applies to --detector pom")),
        (k, None) => Ok(k),
    }
}

fn base_config(command: Command, c: &Common) -> Result<RunConfig> {
    Ok(RunConfig {
        command,
        n: c.n,
        noise_var: c.noise_var.unwrap_or(1.0),
        snr_db: c.snr_db,
        signal: c.signal.into(),
        sine_freq: c.sine_freq,
        detector: detector(c)?,
        pf: c.pf,
        gamma: c.gamma,
        zeta_pf: c.zeta_pf,
        trials: c.trials,
        calib_trials: c.calib_trials,
        chunk_size: c.chunk_size,
        seed: c.seed,
        k_max: c.k_max,
        pf_grid: None,
        snr_grid_db: None,
        gamma_grid: None,
        input: None,
        truth: None,
    })
}

fn build_config(sub: &Sub) -> Result<RunConfig> {
    let grid =
        |name: &str, g: &Option<String>| g.as_deref().map(|s| parse_grid(name, s)).transpose();
    Ok(match sub {
        Sub::Sense {
            common,
            input,
            truth,
        } => {
            if common.noise_var.is_none() {
                return Err(CliError::config(
                    "sense needs the noise variance (--noise-var)",
                ));
            }
            let mut cfg = base_config(Command::Sense, common)?;
            cfg.pf = Some(common.pf.unwrap_or(DEFAULT_PF));
            cfg.input = input.clone();
            cfg.truth = truth.map(|t| match t {
                TruthArg::H0 => Hypothesis::H0,
                TruthArg::H1 => Hypothesis::H1,
            });
            cfg
        }
        Sub::Roc { common, pf_grid } => {
            let mut cfg = base_config(Command::Roc, common)?;
            cfg.pf_grid = grid("pf grid", pf_grid)?;
            cfg
        }
        Sub::PdVsSnr { common, snr_grid } => {
            let mut cfg = base_config(Command::PdVsSnr, common)?;
            if cfg.pf.is_none() && cfg.gamma.is_none() {
                cfg.pf = Some(DEFAULT_PF);
            }
            cfg.snr_grid_db = grid("snr grid", snr_grid)?;
            cfg
        }
        Sub::TotalError { common, gamma_grid } => {
            let mut cfg = base_config(Command::TotalError, common)?;
            cfg.gamma_grid = grid("gamma grid", gamma_grid)?;
            cfg
        }
        Sub::Table2 { common, snr_grid } => {
            let mut cfg = base_config(Command::Table2, common)?;
            cfg.snr_grid_db = grid("snr grid", snr_grid)?;
            cfg
        }
        Sub::Calibrate { common } => {
            let mut cfg = base_config(Command::Calibrate, common)?;
            cfg.pf = Some(common.pf.unwrap_or(DEFAULT_PF));
            cfg
        }
        Sub::Rerun { .. } => unreachable!("handled by the caller"),
    })
}

/// Reads the configuration embedded in an earlier output and the format it used.
fn load_config(path: &Path) -> Result<(RunConfig, Format)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err = |line: usize, reason: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    if text.trim_start().starts_with('{') {
        let report: Report = serde_json::from_str(&text)
            .map_err(|e| parse_err(e.line(), format!("not a ulad JSON report: {e}")))?;
        return Ok((report.config, Format::Json));
    }
    for (i, line) in text.lines().enumerate() {
        if let Some(json) = line.strip_prefix(CONFIG_PREFIX) {
            let cfg = serde_json::from_str(json)
                .map_err(|e| parse_err(i + 1, format!("bad embedded config: {e}")))?;
            return Ok((cfg, Format::Csv));
        }
    }
    Err(parse_err(1, "no embedded configuration found".into()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::config("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
    }
    let (cfg, default_format) = match &cli.command {
        Sub::Rerun { file } => load_config(file)?,
        sub => (build_config(sub)?, Format::Csv),
    };
    cfg.validate()?;
    let table = run::run(&cfg)?;
    for note in &table.notes {
        if note.starts_with("warning") {
            eprintln!("{note}");
        }
    }
    let text = match cli.format.unwrap_or(default_format) {
        Format::Csv => render_csv(&cfg, &table),
        Format::Json => render_json(&cfg, &table),
    };
    write_output(cli.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("g", "1,2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
        assert_eq!(
            parse_grid("g", "-18:-8:5").unwrap(),
            vec![-18.0, -13.0, -8.0]
        );
        assert_eq!(parse_grid("g", "0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_grid("g", "0.01:0.5:0.01").unwrap().len(), 50);
        assert!(parse_grid("g", "1:0:1").is_err());
        assert!(parse_grid("g", "0:1:0").is_err());
        assert!(parse_grid("g", "a,b").is_err());
        assert!(parse_grid("g", "1:2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
