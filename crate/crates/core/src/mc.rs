//! Monte Carlo estimation of false-alarm and detection rates.
//!
//! Trials are grouped in fixed-size chunks. Chunk `k` of a given stream draws
//! from its own ChaCha8 stream keyed by `(seed, purpose, grid point, k)`, so a
//! run produces the same numbers on any number of worker threads. Chunk
//! results are reduced in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::threshold_from_pf;
use crate::detectors::{statistic_from_z, DetectorKind};
use crate::error::{Error, Result};
use crate::gof::z_transform_slice;
use crate::signal::{
    db_to_linear, fill_block, make_block, Hypothesis, NoiseParams, SampleBlock, SignalSpec,
};

pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_CALIB_TRIALS: usize = 100_000;
pub const DEFAULT_CHUNK_SIZE: usize = 1024;

/// Below this many expected exceedances a calibrated threshold is flagged as imprecise.
pub const MIN_CALIB_EXCEEDANCES: f64 = 50.0;

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub noise: NoiseParams,
    pub signal: SignalSpec,
    pub n: usize,
    pub trials: usize,
    pub calib_trials: usize,
    pub detector: DetectorKind,
    pub target_pf: Option<f64>,
    pub gamma_override: Option<f64>,
    pub seed: u64,
    pub rho_grid_db: Option<Vec<f64>>,
    pub gamma_grid: Option<Vec<f64>>,
    pub chunk_size: usize,
}

impl ExperimentPlan {
    pub fn new(
        noise: NoiseParams,
        signal: SignalSpec,
        n: usize,
        detector: DetectorKind,
        seed: u64,
    ) -> Self {
        Self {
            noise,
            signal,
            n,
            trials: DEFAULT_TRIALS,
            calib_trials: DEFAULT_CALIB_TRIALS,
            detector,
            target_pf: None,
            gamma_override: None,
            seed,
            rho_grid_db: None,
            gamma_grid: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_calib_trials(mut self, calib_trials: usize) -> Self {
        self.calib_trials = calib_trials;
        self
    }

    pub fn with_target_pf(mut self, pf: f64) -> Self {
        self.target_pf = Some(pf);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma_override = Some(gamma);
        self
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Result<Self> {
        self.signal = self.signal.with_snr_linear(db_to_linear(snr_db))?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be >= 1"));
        }
        if self.chunk_size == 0 {
            return Err(Error::param("chunk size", "must be >= 1"));
        }
        self.signal.validate()?;
        self.detector.validate()?;
        if let Some(pf) = self.target_pf {
            if !(pf > 0.0 && pf < 1.0) {
                return Err(Error::param(
                    "target pf",
                    format!("must lie in (0, 1), got {pf}"),
                ));
            }
        }
        if let Some(g) = self.gamma_override {
            if g.is_nan() {
                return Err(Error::param("gamma", "must not be NaN"));
            }
        }
        Ok(())
    }

    /// Checks that a detection run has exactly one way to pick its threshold.
    pub fn validate_detection_run(&self) -> Result<()> {
        self.validate()?;
        match (self.target_pf, self.gamma_override) {
            (Some(_), None) | (None, Some(_)) => Ok(()),
            (None, None) => Err(Error::param(
                "threshold",
                "a detection run needs a target Pf or a fixed gamma",
            )),
            (Some(_), Some(_)) => Err(Error::param(
                "threshold",
                "give either a target Pf or a fixed gamma, not both",
            )),
        }
    }
}

/// A Monte Carlo probability estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub trials: usize,
    pub std_err: f64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_count(hits: usize, trials: usize, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            p_hat: p,
            trials,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
        }
    }

    /// `|p_hat - p| <= k * std_err`, with the standard error taken at `p`.
    pub fn within_sigma_of(&self, p: f64, k: f64) -> bool {
        let se = (p * (1.0 - p) / self.trials as f64).sqrt();
        (self.p_hat - p).abs() <= k * se
    }
}

/// Independent random streams used by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Evaluation(Hypothesis),
    Calibration,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Evaluation(Hypothesis::H0) => 1,
            Purpose::Evaluation(Hypothesis::H1) => 2,
            Purpose::Calibration => 3,
        }
    }
}

/// Identifies one stream of blocks: what it is for and which grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub purpose: Purpose,
    pub point: u32,
}

impl StreamKey {
    pub fn new(purpose: Purpose, point: u32) -> Self {
        Self { purpose, point }
    }

    fn chunk_rng(self, seed: u64, chunk: usize) -> ChaCha8Rng {
        debug_assert!(chunk < (1 << 24));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((self.purpose.tag() << 56) | ((self.point as u64) << 24) | chunk as u64);
        rng
    }
}

/// Simulates `trials` blocks under `truth` and returns, per detector, the
/// statistic of every trial in trial order. All detectors see the same blocks.
pub fn simulate_statistics(
    plan: &ExperimentPlan,
    detectors: &[DetectorKind],
    truth: Hypothesis,
    key: StreamKey,
    trials: usize,
) -> Result<Vec<Vec<f64>>> {
    plan.validate()?;
    for d in detectors {
        d.validate()?;
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let chunk = plan.chunk_size;
    let n_chunks = trials.div_ceil(chunk);
    if n_chunks >= 1 << 24 {
        return Err(Error::param(
            "trials",
            "too many chunks; raise the chunk size",
        ));
    }
    let per_chunk: Vec<Vec<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = key.chunk_rng(plan.seed, c);
            let count = chunk.min(trials - c * chunk);
            let mut out = vec![Vec::with_capacity(count); detectors.len()];
            let mut buf = vec![0.0; plan.n];
            for _ in 0..count {
                fill_block(&plan.noise, &plan.signal, truth, &mut buf, &mut rng);
                let zb = z_transform_slice(&buf, &plan.noise);
                for (slot, &kind) in out.iter_mut().zip(detectors) {
                    slot.push(statistic_from_z(kind, &zb)?.value);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut result: Vec<Vec<f64>> = (0..detectors.len())
        .map(|_| Vec::with_capacity(trials))
        .collect();
    for chunk_out in per_chunk {
        for (dst, src) in result.iter_mut().zip(chunk_out) {
            dst.extend(src);
        }
    }
    Ok(result)
}

/// The first block of the evaluation stream for `truth`, i.e. the block that
/// trial 0 of [`estimate_rate`] sees.
pub fn sample_block(plan: &ExperimentPlan, truth: Hypothesis) -> Result<SampleBlock> {
    plan.validate()?;
    let mut rng = StreamKey::new(Purpose::Evaluation(truth), 0).chunk_rng(plan.seed, 0);
    make_block(&plan.noise, &plan.signal, truth, plan.n, &mut rng)
}

/// Statistic values sorted ascending, for counting exceedances at many thresholds.
#[derive(Debug, Clone)]
pub struct SortedStatistics(Vec<f64>);

impl SortedStatistics {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Number of values `>= threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.0.len() - self.0.partition_point(|&v| v < threshold)
    }

    pub fn rate(&self, threshold: f64, seed: u64) -> McEstimate {
        McEstimate::from_count(self.count_at_least(threshold), self.0.len(), seed)
    }

    /// Conservative upper quantile: the returned threshold is reached by at
    /// most `floor(pf * len)` of the values (ties aside).
    pub fn upper_quantile(&self, pf: f64) -> f64 {
        let len = self.0.len();
        let exceed = ((pf * len as f64) * (1.0 + 1e-12)).floor() as usize;
        let idx = (len - exceed.min(len)).min(len - 1);
        self.0[idx]
    }
}

/// Fraction of `plan.trials` blocks under `truth` whose statistic reaches `threshold`.
pub fn estimate_rate(
    plan: &ExperimentPlan,
    truth: Hypothesis,
    threshold: f64,
) -> Result<McEstimate> {
    let key = StreamKey::new(Purpose::Evaluation(truth), 0);
    let stats = simulate_statistics(plan, &[plan.detector], truth, key, plan.trials)?;
    let hits = stats[0].iter().filter(|&&v| v >= threshold).count();
    Ok(McEstimate::from_count(hits, plan.trials, plan.seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub detector: DetectorKind,
    pub threshold: f64,
    pub target_pf: f64,
    pub calib_trials: usize,
    /// Set when `target_pf * calib_trials` is too small for a stable quantile.
    pub warning: Option<String>,
}

fn check_calibration_request(target_pf: f64, calib_trials: usize) -> Result<Option<String>> {
    if !(target_pf > 0.0 && target_pf < 1.0) {
        return Err(Error::param(
            "target pf",
            format!("must lie in (0, 1), got {target_pf}"),
        ));
    }
    if (calib_trials as f64) < 1.0 / target_pf {
        return Err(Error::param(
            "calibration trials",
            format!(
                "need at least 1/pf = {:.0} trials, got {calib_trials}",
                (1.0 / target_pf).ceil()
            ),
        ));
    }
    let expected = target_pf * calib_trials as f64;
    Ok((expected < MIN_CALIB_EXCEEDANCES).then(|| {
        format!(
            "only {expected:.1} expected exceedances at pf = {target_pf}; the threshold is imprecise"
        )
    }))
}

/// Empirical `(1 - target_pf)` quantile of the statistic over `calib_trials`
/// `H0` blocks drawn from the calibration stream.
pub fn calibrate_threshold(
    plan: &ExperimentPlan,
    target_pf: f64,
    calib_trials: usize,
) -> Result<Calibration> {
    let warning = check_calibration_request(target_pf, calib_trials)?;
    let key = StreamKey::new(Purpose::Calibration, 0);
    let stats = simulate_statistics(plan, &[plan.detector], Hypothesis::H0, key, calib_trials)?;
    let sorted = SortedStatistics::new(stats.into_iter().next().unwrap_or_default());
    Ok(Calibration {
        detector: plan.detector,
        threshold: sorted.upper_quantile(target_pf),
        target_pf,
        calib_trials,
        warning,
    })
}

/// Thresholds for several detectors at once: analytic for ULAD, calibrated on
/// shared `H0` calibration blocks for the rest.
pub fn thresholds_for(
    plan: &ExperimentPlan,
    detectors: &[DetectorKind],
    target_pf: f64,
) -> Result<Vec<f64>> {
    let calibrated: Vec<DetectorKind> = detectors
        .iter()
        .copied()
        .filter(|d| *d != DetectorKind::Ulad)
        .collect();
    let sorted = if calibrated.is_empty() {
        Vec::new()
    } else {
        check_calibration_request(target_pf, plan.calib_trials)?;
        let key = StreamKey::new(Purpose::Calibration, 0);
        simulate_statistics(plan, &calibrated, Hypothesis::H0, key, plan.calib_trials)?
            .into_iter()
            .map(SortedStatistics::new)
            .collect()
    };
    let mut next = sorted.iter();
    detectors
        .iter()
        .map(|d| match d {
            DetectorKind::Ulad => threshold_from_pf(target_pf, plan.n),
            _ => Ok(next
                .next()
                .expect("one calibration per baseline")
                .upper_quantile(target_pf)),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub target_pf: f64,
    pub threshold: f64,
    /// Empirical false-alarm rate at `threshold` on the evaluation stream.
    pub pf: McEstimate,
    pub pd: McEstimate,
}

/// Detection probability at each target false-alarm rate in `pf_grid`.
pub fn roc_sweep(plan: &ExperimentPlan, pf_grid: &[f64]) -> Result<Vec<RocPoint>> {
    plan.validate()?;
    if pf_grid.is_empty() {
        return Err(Error::param("pf grid", "must not be empty"));
    }
    let mut thresholds = Vec::with_capacity(pf_grid.len());
    if plan.detector == DetectorKind::Ulad {
        for &pf in pf_grid {
            thresholds.push(threshold_from_pf(pf, plan.n)?);
        }
    } else {
        for &pf in pf_grid {
            check_calibration_request(pf, plan.calib_trials)?;
        }
        let key = StreamKey::new(Purpose::Calibration, 0);
        let calib = simulate_statistics(
            plan,
            &[plan.detector],
            Hypothesis::H0,
            key,
            plan.calib_trials,
        )?;
        let sorted = SortedStatistics::new(calib.into_iter().next().unwrap_or_default());
        thresholds.extend(pf_grid.iter().map(|&pf| sorted.upper_quantile(pf)));
    }
    let eval = |truth| -> Result<SortedStatistics> {
        let key = StreamKey::new(Purpose::Evaluation(truth), 0);
        let s = simulate_statistics(plan, &[plan.detector], truth, key, plan.trials)?;
        Ok(SortedStatistics::new(
            s.into_iter().next().unwrap_or_default(),
        ))
    };
    let h0 = eval(Hypothesis::H0)?;
    let h1 = eval(Hypothesis::H1)?;
    Ok(pf_grid
        .iter()
        .zip(&thresholds)
        .map(|(&target_pf, &threshold)| RocPoint {
            target_pf,
            threshold,
            pf: h0.rate(threshold, plan.seed),
            pd: h1.rate(threshold, plan.seed),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub threshold: f64,
    pub pd: McEstimate,
}

/// Detection probability across an SNR grid at one fixed threshold, taken
/// from `gamma_override` or derived from `target_pf`.
pub fn pd_vs_snr(plan: &ExperimentPlan, snr_grid_db: &[f64]) -> Result<Vec<SnrPoint>> {
    plan.validate_detection_run()?;
    if snr_grid_db.is_empty() {
        return Err(Error::param("snr grid", "must not be empty"));
    }
    let threshold = match (plan.gamma_override, plan.target_pf) {
        (Some(g), _) => g,
        (None, Some(pf)) => thresholds_for(plan, &[plan.detector], pf)?[0],
        (None, None) => unreachable!("validated above"),
    };
    let mut points = Vec::with_capacity(snr_grid_db.len());
    for (i, &snr_db) in snr_grid_db.iter().enumerate() {
        let point_plan = plan.clone().with_snr_db(snr_db)?;
        let key = StreamKey::new(Purpose::Evaluation(Hypothesis::H1), i as u32);
        let stats = simulate_statistics(
            &point_plan,
            &[plan.detector],
            Hypothesis::H1,
            key,
            plan.trials,
        )?;
        let hits = stats[0].iter().filter(|&&v| v >= threshold).count();
        points.push(SnrPoint {
            snr_db,
            threshold,
            pd: McEstimate::from_count(hits, plan.trials, plan.seed),
        });
    }
    Ok(points)
}

/// Detection probability of several detectors on shared blocks, each at its
/// own threshold for `target_pf`.
pub fn compare_detectors(
    plan: &ExperimentPlan,
    detectors: &[DetectorKind],
    target_pf: f64,
) -> Result<Vec<(DetectorKind, f64, McEstimate)>> {
    let thresholds = thresholds_for(plan, detectors, target_pf)?;
    let key = StreamKey::new(Purpose::Evaluation(Hypothesis::H1), 0);
    let stats = simulate_statistics(plan, detectors, Hypothesis::H1, key, plan.trials)?;
    Ok(detectors
        .iter()
        .zip(thresholds)
        .zip(stats)
        .map(|((&d, t), s)| {
            let hits = s.iter().filter(|&&v| v >= t).count();
            (d, t, McEstimate::from_count(hits, plan.trials, plan.seed))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalErrorPoint {
    pub gamma: f64,
    pub pf: f64,
    pub pd: f64,
    pub p_error: f64,
}

/// Empirical `Pf + (1 - Pd)` at each threshold, from `plan.trials` blocks per hypothesis.
pub fn total_error_sweep(
    plan: &ExperimentPlan,
    gamma_grid: &[f64],
) -> Result<Vec<TotalErrorPoint>> {
    plan.validate()?;
    if gamma_grid.is_empty() {
        return Err(Error::param("gamma grid", "must not be empty"));
    }
    let sorted = |truth| -> Result<SortedStatistics> {
        let key = StreamKey::new(Purpose::Evaluation(truth), 0);
        let s = simulate_statistics(plan, &[plan.detector], truth, key, plan.trials)?;
        Ok(SortedStatistics::new(
            s.into_iter().next().unwrap_or_default(),
        ))
    };
    let h0 = sorted(Hypothesis::H0)?;
    let h1 = sorted(Hypothesis::H1)?;
    Ok(gamma_grid
        .iter()
        .map(|&gamma| {
            let pf = h0.rate(gamma, plan.seed).p_hat;
            let pd = h1.rate(gamma, plan.seed).p_hat;
            TotalErrorPoint {
                gamma,
                pf,
                pd,
                p_error: pf + 1.0 - pd,
            }
        })
        .collect())
}

/// Grid point with the smallest total error; the first one wins ties.
pub fn argmin_total_error(points: &[TotalErrorPoint]) -> Option<TotalErrorPoint> {
    points
        .iter()
        .copied()
        .reduce(|best, p| if p.p_error < best.p_error { p } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::pf_ulad;

    fn plan(detector: DetectorKind, snr_db: f64) -> ExperimentPlan {
        ExperimentPlan::new(
            NoiseParams::unit(),
            SignalSpec::bpsk(db_to_linear(snr_db)).unwrap(),
            200,
            detector,
            0xC0FFEE,
        )
        .with_trials(4000)
        .with_calib_trials(4000)
    }

    #[test]
    fn neg_infinite_threshold_detects_everything() {
        for d in [DetectorKind::Ulad, DetectorKind::Ks, DetectorKind::Pom(0.2)] {
            let p = plan(d, -10.0).with_trials(300);
            assert_eq!(
                estimate_rate(&p, Hypothesis::H1, f64::NEG_INFINITY)
                    .unwrap()
                    .p_hat,
                1.0
            );
            assert_eq!(
                estimate_rate(&p, Hypothesis::H0, f64::NEG_INFINITY)
                    .unwrap()
                    .p_hat,
                1.0
            );
        }
    }

    #[test]
    fn chunking_does_not_change_trial_count() {
        let mut p = plan(DetectorKind::Ulad, -10.0).with_trials(2500);
        p.chunk_size = 1000;
        let s = simulate_statistics(
            &p,
            &[DetectorKind::Ulad],
            Hypothesis::H0,
            StreamKey::new(Purpose::Calibration, 0),
            2500,
        )
        .unwrap();
        assert_eq!(s[0].len(), 2500);
    }

    #[test]
    fn sample_block_is_first_trial() {
        let p = plan(DetectorKind::Ulad, -10.0).with_trials(3);
        let b = sample_block(&p, Hypothesis::H1).unwrap();
        let zb = z_transform_slice(b.samples(), &p.noise);
        let s = statistic_from_z(DetectorKind::Ulad, &zb).unwrap().value;
        let key = StreamKey::new(Purpose::Evaluation(Hypothesis::H1), 0);
        let all = simulate_statistics(&p, &[DetectorKind::Ulad], Hypothesis::H1, key, 3).unwrap();
        assert_eq!(all[0][0], s);
        assert_eq!(b.truth(), Some(Hypothesis::H1));
    }

    #[test]
    fn streams_are_disjoint() {
        let p = plan(DetectorKind::Ulad, -10.0).with_trials(64);
        let a = simulate_statistics(
            &p,
            &[DetectorKind::Ulad],
            Hypothesis::H0,
            StreamKey::new(Purpose::Calibration, 0),
            64,
        )
        .unwrap();
        let b = simulate_statistics(
            &p,
            &[DetectorKind::Ulad],
            Hypothesis::H0,
            StreamKey::new(Purpose::Evaluation(Hypothesis::H0), 0),
            64,
        )
        .unwrap();
        let c = simulate_statistics(
            &p,
            &[DetectorKind::Ulad],
            Hypothesis::H0,
            StreamKey::new(Purpose::Calibration, 1),
            64,
        )
        .unwrap();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn same_seed_same_result() {
        let p = plan(DetectorKind::Ad, -12.0).with_trials(2000);
        let a = estimate_rate(&p, Hypothesis::H1, 1.0).unwrap();
        let b = estimate_rate(&p, Hypothesis::H1, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn std_err_halves_with_four_times_trials() {
        let e1 = McEstimate::from_count(250, 1000, 0);
        let e4 = McEstimate::from_count(1000, 4000, 0);
        assert!((e1.std_err / e4.std_err - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_is_conservative() {
        let s = SortedStatistics::new((1..=100).map(|v| v as f64).collect());
        let t = s.upper_quantile(0.05);
        assert_eq!(t, 96.0);
        assert_eq!(s.count_at_least(t), 5);
        assert_eq!(s.upper_quantile(0.5), 51.0);
        assert_eq!(s.count_at_least(f64::NEG_INFINITY), 100);
        assert_eq!(s.count_at_least(1000.0), 0);
    }

    #[test]
    fn calibration_checks() {
        let p = plan(DetectorKind::Ed, -10.0);
        assert!(calibrate_threshold(&p, 0.01, 50).is_err());
        assert!(calibrate_threshold(&p, 0.0, 500).is_err());
        let c = calibrate_threshold(&p, 0.01, 1000).unwrap();
        assert!(c.warning.is_some());
        let c = calibrate_threshold(&p, 0.05, 4000).unwrap();
        assert!(c.warning.is_none());
    }

    #[test]
    fn ulad_calibration_near_zero_at_half() {
        let p = plan(DetectorKind::Ulad, -10.0);
        let c = calibrate_threshold(&p, 0.5, 4000).unwrap();
        // sd of B_n is sqrt(n); quantile error ~ 1.25 sqrt(n / trials)
        assert!(
            c.threshold.abs() < 4.0 * (200.0f64 / 4000.0).sqrt() * 1.25,
            "{}",
            c.threshold
        );
    }

    #[test]
    fn detection_run_needs_exactly_one_threshold_source() {
        let p = plan(DetectorKind::Ulad, -10.0);
        assert!(p.validate_detection_run().is_err());
        assert!(p
            .clone()
            .with_target_pf(0.1)
            .validate_detection_run()
            .is_ok());
        assert!(p.clone().with_gamma(3.0).validate_detection_run().is_ok());
        assert!(p
            .with_gamma(3.0)
            .with_target_pf(0.1)
            .validate_detection_run()
            .is_err());
    }

    #[test]
    fn roc_on_diagonal_at_zero_snr() {
        let mut p = plan(DetectorKind::Ulad, -10.0).with_trials(20_000);
        p.signal = p.signal.with_snr_linear(0.0).unwrap();
        let roc = roc_sweep(&p, &[0.1, 0.3, 0.5]).unwrap();
        for pt in roc {
            let expect = pf_ulad(pt.threshold, p.n);
            assert!((pt.pd.p_hat - expect).abs() < 0.02, "{pt:?}");
        }
    }

    #[test]
    fn single_point_total_error() {
        let p = plan(DetectorKind::Ulad, -10.0).with_trials(500);
        let pts = total_error_sweep(&p, &[10.0]).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].p_error - (pts[0].pf + 1.0 - pts[0].pd)).abs() < 1e-15);
        assert!(total_error_sweep(&p, &[]).is_err());
    }

    #[test]
    fn argmin_picks_first_minimum() {
        let mk = |gamma, e| TotalErrorPoint {
            gamma,
            pf: 0.0,
            pd: 0.0,
            p_error: e,
        };
        let pts = [mk(1.0, 0.5), mk(2.0, 0.2), mk(3.0, 0.2), mk(4.0, 0.9)];
        assert_eq!(argmin_total_error(&pts).unwrap().gamma, 2.0);
        assert!(argmin_total_error(&[]).is_none());
    }
}
