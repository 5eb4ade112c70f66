use ulad_core::analytic::threshold_from_pf;
use ulad_core::detectors::DetectorKind;
use ulad_core::mc::{calibrate_threshold, estimate_rate, roc_sweep, ExperimentPlan};
use ulad_core::signal::{db_to_linear, Hypothesis, NoiseParams, SignalSpec};

fn plan(n: usize, snr_db: f64, detector: DetectorKind, seed: u64) -> ExperimentPlan {
    ExperimentPlan::new(
        NoiseParams::unit(),
        SignalSpec::bpsk(db_to_linear(snr_db)).unwrap(),
        n,
        detector,
        seed,
    )
}

#[test]
fn ulad_calibration_matches_closed_form_threshold() {
    let p = plan(1000, -14.0, DetectorKind::Ulad, 11).with_calib_trials(100_000);
    let cal = calibrate_threshold(&p, 0.05, p.calib_trials).unwrap();
    let analytic = threshold_from_pf(0.05, 1000).unwrap();
    assert!(cal.warning.is_none());
    assert!(
        ((cal.threshold - analytic) / analytic).abs() < 0.02,
        "{} vs {analytic}",
        cal.threshold
    );
}

#[test]
fn calibrated_energy_detector_holds_pf_on_fresh_blocks() {
    let p = plan(1000, -14.0, DetectorKind::Ed, 12)
        .with_calib_trials(100_000)
        .with_trials(100_000);
    let cal = calibrate_threshold(&p, 0.05, p.calib_trials).unwrap();
    let fresh = ExperimentPlan { seed: 13, ..p };
    let est = estimate_rate(&fresh, Hypothesis::H0, cal.threshold).unwrap();
    assert!(est.within_sigma_of(0.05, 3.0), "{est:?}");
}

#[test]
fn longer_blocks_detect_better() {
    let grid = [0.01, 0.05, 0.1, 0.2, 0.5];
    let short = roc_sweep(
        &plan(500, -14.0, DetectorKind::Ulad, 21).with_trials(20_000),
        &grid,
    )
    .unwrap();
    let long = roc_sweep(
        &plan(1500, -14.0, DetectorKind::Ulad, 21).with_trials(20_000),
        &grid,
    )
    .unwrap();
    for (a, b) in short.iter().zip(&long) {
        let se = a.pd.std_err.max(b.pd.std_err);
        assert!(b.pd.p_hat >= a.pd.p_hat - 3.0 * se, "{a:?} {b:?}");
    }
}

#[test]
fn roc_is_nondecreasing() {
    let grid = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5];
    for d in [DetectorKind::Ulad, DetectorKind::Cm, DetectorKind::Avc] {
        let p = plan(300, -12.0, d, 31)
            .with_trials(10_000)
            .with_calib_trials(10_000);
        let roc = roc_sweep(&p, &grid).unwrap();
        for w in roc.windows(2) {
            assert!(w[1].pd.p_hat >= w[0].pd.p_hat, "{d}: {w:?}");
        }
    }
}

#[test]
fn standard_error_halves_when_trials_quadruple() {
    let g = threshold_from_pf(0.2, 400).unwrap();
    let a = estimate_rate(
        &plan(400, -14.0, DetectorKind::Ulad, 41).with_trials(10_000),
        Hypothesis::H0,
        g,
    )
    .unwrap();
    let b = estimate_rate(
        &plan(400, -14.0, DetectorKind::Ulad, 41).with_trials(40_000),
        Hypothesis::H0,
        g,
    )
    .unwrap();
    let ratio = a.std_err / b.std_err;
    assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
}

#[test]
fn thread_count_does_not_change_estimates() {
    let p = plan(256, -12.0, DetectorKind::Ks, 51)
        .with_trials(8_000)
        .with_calib_trials(8_000);
    let run = || format!("{:?}", roc_sweep(&p, &[0.05, 0.2]).unwrap());
    let results: Vec<String> = [1, 3, 8]
        .into_iter()
        .map(|t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(run)
        })
        .collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
