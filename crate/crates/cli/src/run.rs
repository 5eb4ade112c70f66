//! Executes a validated [`RunConfig`] and collects the result table.

use ulad_core::analytic::{pd_ulad, threshold_from_pf, PdMode, UladAnalytic};
use ulad_core::detectors::{compute_statistic, decide, DetectorKind};
use ulad_core::mc::{
    argmin_total_error, calibrate_threshold, estimate_rate, pd_vs_snr, roc_sweep, sample_block,
    total_error_sweep,
};
use ulad_core::signal::{db_to_linear, Hypothesis, SampleBlock, SignalKind};
use ulad_core::threshold::{optimal_threshold, total_error_rate};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::input::read_samples;
use crate::table::{Cell, Table};

pub const DEFAULT_PF_GRID: [f64; 14] = [
    0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9,
];
pub const DEFAULT_TABLE2_SNR_DB: [f64; 4] = [-14.0, -13.0, -12.0, -11.0];

pub fn default_snr_grid() -> Vec<f64> {
    (-20..=-6).map(f64::from).collect()
}

pub fn default_gamma_grid() -> Vec<f64> {
    (-80..=180).map(f64::from).collect()
}

fn hypothesis_name(h: Hypothesis) -> &'static str {
    match h {
        Hypothesis::H0 => "H0",
        Hypothesis::H1 => "H1",
    }
}

/// Closed-form moments, available for ULAD under the constant-envelope
/// (BPSK) signal model only.
fn ulad_moments(cfg: &RunConfig, snr_db: f64) -> Result<Option<UladAnalytic>> {
    if cfg.detector != DetectorKind::Ulad || cfg.signal != SignalKind::Bpsk {
        return Ok(None);
    }
    let noise = cfg.noise()?;
    let rho = db_to_linear(snr_db);
    Ok(Some(UladAnalytic::h1_moments(rho, &noise, cfg.k_max)?))
}

pub fn run(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.command {
        Command::Sense => sense(cfg),
        Command::Roc => roc(cfg),
        Command::PdVsSnr => snr_sweep(cfg),
        Command::TotalError => total_error(cfg),
        Command::Table2 => table2(cfg),
        Command::Calibrate => calibrate(cfg),
    }
}

fn sense(cfg: &RunConfig) -> Result<Table> {
    let noise = cfg.noise()?;
    let pf = cfg.pf.expect("validated");
    let block = match &cfg.input {
        Some(path) => {
            let samples = read_samples(path)?;
            if samples.len() != cfg.n {
                return Err(CliError::config(format!(
                    "--n is {} but {} holds {} samples",
                    cfg.n,
                    path.display(),
                    samples.len()
                )));
            }
            SampleBlock::observed(samples)?
        }
        None => sample_block(&cfg.plan()?, cfg.truth.unwrap_or(Hypothesis::H0))?,
    };
    let stat = compute_statistic(DetectorKind::Ulad, &block, &noise)?;
    let threshold = threshold_from_pf(pf, block.n())?;
    let decision = decide(stat, threshold)?;
    let mut t = Table::new(&["n", "statistic", "threshold", "pf", "verdict", "truth"]);
    t.push(vec![
        block.n().into(),
        stat.value.into(),
        threshold.into(),
        pf.into(),
        hypothesis_name(decision.verdict).into(),
        block
            .truth()
            .map_or(Cell::Missing, |h| hypothesis_name(h).into()),
    ]);
    Ok(t)
}

fn roc(cfg: &RunConfig) -> Result<Table> {
    let grid = cfg
        .pf_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_PF_GRID.to_vec());
    let points = roc_sweep(&cfg.plan()?, &grid)?;
    let moments = ulad_moments(cfg, cfg.snr_db)?;
    let mut t = Table::new(&[
        "target_pf",
        "threshold",
        "pf_hat",
        "pf_std_err",
        "pd_hat",
        "pd_std_err",
        "pd_exact",
        "pd_approx",
    ]);
    for p in points {
        let (exact, approx) = match &moments {
            Some(m) => (
                Some(pd_ulad(p.threshold, cfg.n, m, PdMode::Exact)?),
                Some(pd_ulad(p.threshold, cfg.n, m, PdMode::Approx)?),
            ),
            None => (None, None),
        };
        t.push(vec![
            p.target_pf.into(),
            p.threshold.into(),
            p.pf.p_hat.into(),
            p.pf.std_err.into(),
            p.pd.p_hat.into(),
            p.pd.std_err.into(),
            exact.into(),
            approx.into(),
        ]);
    }
    Ok(t)
}

fn snr_sweep(cfg: &RunConfig) -> Result<Table> {
    let grid = cfg.snr_grid_db.clone().unwrap_or_else(default_snr_grid);
    let points = pd_vs_snr(&cfg.plan()?, &grid)?;
    let mut t = Table::new(&["snr_db", "threshold", "pd_hat", "pd_std_err", "pd_exact"]);
    for p in points {
        let exact = match ulad_moments(cfg, p.snr_db)? {
            Some(m) => Some(pd_ulad(p.threshold, cfg.n, &m, PdMode::Exact)?),
            None => None,
        };
        t.push(vec![
            p.snr_db.into(),
            p.threshold.into(),
            p.pd.p_hat.into(),
            p.pd.std_err.into(),
            exact.into(),
        ]);
    }
    Ok(t)
}

fn total_error(cfg: &RunConfig) -> Result<Table> {
    let grid = cfg.gamma_grid.clone().unwrap_or_else(default_gamma_grid);
    let points = total_error_sweep(&cfg.plan()?, &grid)?;
    let moments = ulad_moments(cfg, cfg.snr_db)?;
    let mut t = Table::new(&["gamma", "pf_hat", "pd_hat", "p_error", "p_error_analytic"]);
    for p in &points {
        let analytic = match &moments {
            Some(m) => Some(total_error_rate(p.gamma, cfg.n, m)?),
            None => None,
        };
        t.push(vec![
            p.gamma.into(),
            p.pf.into(),
            p.pd.into(),
            p.p_error.into(),
            analytic.into(),
        ]);
    }
    if let Some(best) = argmin_total_error(&points) {
        t.note(format!("empirical argmin gamma {}", best.gamma));
    }
    if moments.is_some() {
        let rho = db_to_linear(cfg.snr_db);
        let opt = optimal_threshold(rho, &cfg.noise()?, cfg.n, cfg.k_max, cfg.zeta_pf)?;
        t.note(format!(
            "analytic minimizer {:.6}, constrained optimum {:.6}",
            opt.gamma_min.unwrap_or(f64::NAN),
            opt.gamma_star.unwrap_or(f64::NAN)
        ));
    }
    Ok(t)
}

fn table2(cfg: &RunConfig) -> Result<Table> {
    let grid = cfg
        .snr_grid_db
        .clone()
        .unwrap_or_else(|| DEFAULT_TABLE2_SNR_DB.to_vec());
    let noise = cfg.noise()?;
    let mut t = Table::new(&[
        "snr_db",
        "gamma_min",
        "pf_at_gamma_min",
        "gamma_star",
        "pf_at_gamma_star",
        "constraint_binds",
        "pd_at_gamma_star",
    ]);
    for &snr_db in &grid {
        let rho = db_to_linear(snr_db);
        let opt = optimal_threshold(rho, &noise, cfg.n, cfg.k_max, cfg.zeta_pf)?;
        let star = opt.gamma_star.expect("filled by optimal_threshold");
        let pd = pd_ulad(star, cfg.n, &opt.moments, PdMode::Exact)?;
        t.push(vec![
            snr_db.into(),
            opt.gamma_min.into(),
            opt.pf_at_gamma_min.into(),
            star.into(),
            opt.pf_at_gamma_star.into(),
            if opt.constraint_binds() == Some(true) {
                "yes"
            } else {
                "no"
            }
            .into(),
            pd.into(),
        ]);
    }
    Ok(t)
}

fn calibrate(cfg: &RunConfig) -> Result<Table> {
    let plan = cfg.plan()?;
    let pf = cfg.pf.expect("validated");
    let cal = calibrate_threshold(&plan, pf, cfg.calib_trials)?;
    // Fresh evaluation blocks, disjoint from the calibration stream.
    let check = estimate_rate(&plan, Hypothesis::H0, cal.threshold)?;
    let analytic = match cfg.detector {
        DetectorKind::Ulad => Some(threshold_from_pf(pf, cfg.n)?),
        _ => None,
    };
    let mut t = Table::new(&[
        "detector",
        "target_pf",
        "threshold",
        "threshold_analytic",
        "calib_trials",
        "pf_hat",
        "pf_std_err",
    ]);
    t.push(vec![
        cfg.detector.to_string().into(),
        pf.into(),
        cal.threshold.into(),
        analytic.into(),
        cfg.calib_trials.into(),
        check.p_hat.into(),
        check.std_err.into(),
    ]);
    if let Some(w) = cal.warning {
        t.note(format!("warning: {w}"));
    }
    Ok(t)
}
