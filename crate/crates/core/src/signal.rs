//! Laplacian noise, primary-user waveforms and labelled sample blocks.
//!
//! Under `H0` a block is pure Laplacian noise `Y_i = W_i`; under `H1` it is
//! `Y_i = sqrt(rho) * S_i + W_i` with a unit-power primary signal `S_i`.
//! `rho` is the amplitude-squared scale of the signal term. It equals the
//! SNR only when the noise variance is 1; nothing here renormalizes it.

use std::f64::consts::{PI, SQRT_2};

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which hypothesis generated (or is decided for) a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Noise only, the band is vacant.
    H0,
    /// Primary signal plus noise.
    H1,
}

/// Zero-mean Laplacian noise described by its variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    variance: f64,
}

impl NoiseParams {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::param(
                "noise variance",
                format!("must be finite and > 0, got {variance}"),
            ));
        }
        Ok(Self { variance })
    }

    /// Unit-variance noise, the setting used throughout the experiments.
    pub fn unit() -> Self {
        Self { variance: 1.0 }
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Laplace scale `b = sqrt(variance / 2)`; `|W|` is exponential with mean `b`.
    pub fn scale(&self) -> f64 {
        (self.variance / 2.0).sqrt()
    }

    /// Rate of the exponential law of `|W|`, `sqrt(2 / variance)`.
    pub fn rate(&self) -> f64 {
        (2.0 / self.variance).sqrt()
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::unit()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// Equiprobable `+1` / `-1` symbols.
    Bpsk,
    /// i.i.d. standard normal samples.
    GaussianIid,
    /// `sqrt(2) * sin(2 pi f i + phi)`.
    SineSingleCarrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePolicy {
    /// A fresh uniform phase in `[0, 2 pi)` for every block.
    RandomUniformPerBlock,
    Fixed(f64),
}

/// Primary-user waveform and its power scale `rho` (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub snr_linear: f64,
    pub sine_normalized_freq: f64,
    pub sine_phase_policy: PhasePolicy,
}

pub const DEFAULT_SINE_FREQ: f64 = 0.05;

impl SignalSpec {
    pub fn new(kind: SignalKind, snr_linear: f64) -> Result<Self> {
        let spec = Self {
            kind,
            snr_linear,
            sine_normalized_freq: DEFAULT_SINE_FREQ,
            sine_phase_policy: PhasePolicy::RandomUniformPerBlock,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bpsk(snr_linear: f64) -> Result<Self> {
        Self::new(SignalKind::Bpsk, snr_linear)
    }

    pub fn with_sine(mut self, freq: f64, phase: PhasePolicy) -> Result<Self> {
        self.sine_normalized_freq = freq;
        self.sine_phase_policy = phase;
        self.validate()?;
        Ok(self)
    }

    pub fn with_snr_linear(mut self, snr_linear: f64) -> Result<Self> {
        self.snr_linear = snr_linear;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr_linear.is_finite() && self.snr_linear >= 0.0) {
            return Err(Error::param(
                "snr",
                format!(
                    "linear SNR must be finite and >= 0, got {}",
                    self.snr_linear
                ),
            ));
        }
        if self.kind == SignalKind::SineSingleCarrier {
            let f = self.sine_normalized_freq;
            if !(f > 0.0 && f < 0.5) {
                return Err(Error::param(
                    "sine frequency",
                    format!("normalized frequency must lie in (0, 0.5), got {f}"),
                ));
            }
            if let PhasePolicy::Fixed(phi) = self.sine_phase_policy {
                if !phi.is_finite() {
                    return Err(Error::param("sine phase", "must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// `n` received samples together with the hypothesis that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    samples: Vec<f64>,
    truth: Option<Hypothesis>,
}

impl SampleBlock {
    /// Wraps generated samples with their ground-truth label.
    pub fn labelled(samples: Vec<f64>, truth: Hypothesis) -> Result<Self> {
        Self::check_len(&samples)?;
        Ok(Self {
            samples,
            truth: Some(truth),
        })
    }

    /// Wraps externally observed samples whose hypothesis is unknown.
    pub fn observed(samples: Vec<f64>) -> Result<Self> {
        Self::check_len(&samples)?;
        Ok(Self {
            samples,
            truth: None,
        })
    }

    fn check_len(samples: &[f64]) -> Result<()> {
        if samples.is_empty() {
            return Err(Error::param("block", "a sample block needs n >= 1 samples"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("block", format!("sample {i} is not finite")));
        }
        Ok(())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn truth(&self) -> Option<Hypothesis> {
        self.truth
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("n", "sample count must be >= 1"))
    } else {
        Ok(())
    }
}

/// One Laplacian variate by inverse CDF from a uniform on the open interval.
#[inline]
fn laplacian_from_uniform(u: f64, scale: f64) -> f64 {
    let c = u - 0.5;
    -c.signum() * scale * (1.0 - 2.0 * c.abs()).ln()
}

/// Overwrites `out` with i.i.d. Laplacian noise.
pub fn fill_laplacian<R: Rng + ?Sized>(params: &NoiseParams, out: &mut [f64], rng: &mut R) {
    let scale = params.scale();
    for w in out.iter_mut() {
        let u: f64 = rng.sample(Open01);
        *w = laplacian_from_uniform(u, scale);
    }
}

pub fn draw_laplacian<R: Rng + ?Sized>(
    params: &NoiseParams,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_n(n)?;
    let mut out = vec![0.0; n];
    fill_laplacian(params, &mut out, rng);
    Ok(out)
}

/// Adds `amplitude * S_i` to every element of `out`.
fn add_signal<R: Rng + ?Sized>(spec: &SignalSpec, amplitude: f64, out: &mut [f64], rng: &mut R) {
    match spec.kind {
        SignalKind::Bpsk => {
            for y in out.iter_mut() {
                let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                *y += amplitude * s;
            }
        }
        SignalKind::GaussianIid => {
            for y in out.iter_mut() {
                let s: f64 = rng.sample(StandardNormal);
                *y += amplitude * s;
            }
        }
        SignalKind::SineSingleCarrier => {
            let phase = match spec.sine_phase_policy {
                PhasePolicy::RandomUniformPerBlock => rng.random::<f64>() * 2.0 * PI,
                PhasePolicy::Fixed(phi) => phi,
            };
            let omega = 2.0 * PI * spec.sine_normalized_freq;
            for (i, y) in out.iter_mut().enumerate() {
                let t = (i + 1) as f64;
                *y += amplitude * SQRT_2 * (omega * t + phase).sin();
            }
        }
    }
}

/// Unit-power primary signal samples `S_1..S_n` (the SNR scale is not applied).
pub fn draw_signal<R: Rng + ?Sized>(spec: &SignalSpec, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    check_n(n)?;
    spec.validate()?;
    let mut out = vec![0.0; n];
    add_signal(spec, 1.0, &mut out, rng);
    Ok(out)
}

/// Fills `out` with one block under `truth`, reusing the caller's buffer.
///
/// Noise is drawn first, so an `H0` block equals `fill_laplacian` for the
/// same generator state.
pub fn fill_block<R: Rng + ?Sized>(
    noise: &NoiseParams,
    signal: &SignalSpec,
    truth: Hypothesis,
    out: &mut [f64],
    rng: &mut R,
) {
    fill_laplacian(noise, out, rng);
    if truth == Hypothesis::H1 {
        add_signal(signal, signal.snr_linear.sqrt(), out, rng);
    }
}

pub fn make_block<R: Rng + ?Sized>(
    noise: &NoiseParams,
    signal: &SignalSpec,
    truth: Hypothesis,
    n: usize,
    rng: &mut R,
) -> Result<SampleBlock> {
    check_n(n)?;
    signal.validate()?;
    let mut samples = vec![0.0; n];
    fill_block(noise, signal, truth, &mut samples, rng);
    SampleBlock::labelled(samples, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn moments(v: &[f64]) -> (f64, f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (mean, var, m4 / (var * var))
    }

    #[test]
    fn rejects_bad_noise_variance() {
        assert!(NoiseParams::new(0.0).is_err());
        assert!(NoiseParams::new(-1.0).is_err());
        assert!(NoiseParams::new(f64::NAN).is_err());
        assert!(NoiseParams::new(2.5).is_ok());
    }

    #[test]
    fn laplacian_unit_moments() {
        let w = draw_laplacian(&NoiseParams::unit(), 1_000_000, &mut rng(11)).unwrap();
        let (mean, var, kurt) = moments(&w);
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
        assert!((kurt - 6.0).abs() < 0.2, "kurtosis {kurt}");
    }

    #[test]
    fn laplacian_kurtosis_oracle_by_quadrature() {
        // Brute-force midpoint integration of x^2 f(x) and x^4 f(x) for the
        // unit-variance Laplace density.
        let b = (0.5f64).sqrt();
        let pdf = |x: f64| (-(x.abs()) / b).exp() / (2.0 * b);
        let (lo, hi, steps) = (-40.0, 40.0, 400_000);
        let h = (hi - lo) / steps as f64;
        let (mut m2, mut m4) = (0.0, 0.0);
        for k in 0..steps {
            let x = lo + (k as f64 + 0.5) * h;
            m2 += x * x * pdf(x) * h;
            m4 += x.powi(4) * pdf(x) * h;
        }
        assert!((m2 - 1.0).abs() < 1e-6);
        assert!((m4 / (m2 * m2) - 6.0).abs() < 1e-5);
    }

    #[test]
    fn laplacian_variance_scales() {
        let w = draw_laplacian(&NoiseParams::new(4.0).unwrap(), 1_000_000, &mut rng(12)).unwrap();
        let (_, var, _) = moments(&w);
        assert!((var - 4.0).abs() < 0.08, "var {var}");
    }

    #[test]
    fn laplacian_is_reproducible() {
        let a = draw_laplacian(&NoiseParams::unit(), 256, &mut rng(5)).unwrap();
        let b = draw_laplacian(&NoiseParams::unit(), 256, &mut rng(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn laplacian_matches_analytic_cdf() {
        let mut w = draw_laplacian(&NoiseParams::unit(), 100_000, &mut rng(13)).unwrap();
        w.sort_by(f64::total_cmp);
        let b = NoiseParams::unit().scale();
        let cdf = |x: f64| {
            if x < 0.0 {
                0.5 * (x / b).exp()
            } else {
                1.0 - 0.5 * (-x / b).exp()
            }
        };
        let n = w.len() as f64;
        let d = w
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                ((i + 1) as f64 / n - f).max(f - i as f64 / n)
            })
            .fold(0.0, f64::max);
        assert!(d < 0.01, "KS distance {d}");
    }

    #[test]
    fn zero_length_rejected() {
        assert!(draw_laplacian(&NoiseParams::unit(), 0, &mut rng(1)).is_err());
        let spec = SignalSpec::bpsk(1.0).unwrap();
        assert!(draw_signal(&spec, 0, &mut rng(1)).is_err());
    }

    #[test]
    fn bpsk_symbols() {
        let spec = SignalSpec::bpsk(1.0).unwrap();
        let s = draw_signal(&spec, 1000, &mut rng(2)).unwrap();
        assert!(s.iter().all(|&v| v == 1.0 || v == -1.0));
        let mean = s.iter().sum::<f64>() / 1000.0;
        assert!(mean.abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn gaussian_signal_unit_variance() {
        let spec = SignalSpec::new(SignalKind::GaussianIid, 1.0).unwrap();
        let s = draw_signal(&spec, 1_000_000, &mut rng(3)).unwrap();
        let (_, var, _) = moments(&s);
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn sine_unit_power() {
        let spec = SignalSpec::new(SignalKind::SineSingleCarrier, 1.0)
            .unwrap()
            .with_sine(0.01, PhasePolicy::RandomUniformPerBlock)
            .unwrap();
        let s = draw_signal(&spec, 10_000, &mut rng(4)).unwrap();
        let p = s.iter().map(|x| x * x).sum::<f64>() / s.len() as f64;
        assert!((p - 1.0).abs() < 0.01, "power {p}");
    }

    #[test]
    fn sine_frequency_validated() {
        let base = SignalSpec::new(SignalKind::SineSingleCarrier, 1.0).unwrap();
        assert!(base.with_sine(0.0, PhasePolicy::Fixed(0.0)).is_err());
        assert!(base.with_sine(0.5, PhasePolicy::Fixed(0.0)).is_err());
        assert!(base.with_sine(0.25, PhasePolicy::Fixed(0.3)).is_ok());
    }

    #[test]
    fn negative_snr_rejected() {
        assert!(SignalSpec::bpsk(-0.1).is_err());
    }

    #[test]
    fn h0_block_equals_noise_draw() {
        let spec = SignalSpec::bpsk(0.5).unwrap();
        let block = make_block(
            &NoiseParams::unit(),
            &spec,
            Hypothesis::H0,
            500,
            &mut rng(9),
        )
        .unwrap();
        let noise = draw_laplacian(&NoiseParams::unit(), 500, &mut rng(9)).unwrap();
        assert_eq!(block.samples(), noise.as_slice());
        assert_eq!(block.truth(), Some(Hypothesis::H0));
        assert_eq!(block.n(), 500);
    }

    #[test]
    fn h1_with_zero_snr_is_noise() {
        let spec = SignalSpec::bpsk(0.0).unwrap();
        let block = make_block(
            &NoiseParams::unit(),
            &spec,
            Hypothesis::H1,
            500,
            &mut rng(9),
        )
        .unwrap();
        let noise = draw_laplacian(&NoiseParams::unit(), 500, &mut rng(9)).unwrap();
        assert_eq!(block.samples(), noise.as_slice());
    }

    #[test]
    fn h1_power_adds() {
        let spec = SignalSpec::bpsk(0.04).unwrap();
        let block = make_block(
            &NoiseParams::unit(),
            &spec,
            Hypothesis::H1,
            1_000_000,
            &mut rng(10),
        )
        .unwrap();
        let p = block.samples().iter().map(|y| y * y).sum::<f64>() / 1e6;
        assert!((p - 1.04).abs() < 0.01, "power {p}");
    }

    #[test]
    fn h1_absolute_values_are_larger() {
        let n = 200_000;
        let spec = SignalSpec::bpsk(0.05).unwrap();
        let noise = NoiseParams::unit();
        let h0 = make_block(&noise, &spec, Hypothesis::H0, n, &mut rng(21)).unwrap();
        let h1 = make_block(&noise, &spec, Hypothesis::H1, n, &mut rng(22)).unwrap();
        let stats = |b: &SampleBlock| {
            let a: Vec<f64> = b.samples().iter().map(|y| y.abs()).collect();
            let (m, v, _) = moments(&a);
            (m, v)
        };
        let (m0, v0) = stats(&h0);
        let (m1, v1) = stats(&h1);
        let se = ((v0 + v1) / n as f64).sqrt();
        assert!(m1 - m0 > 3.0 * se, "m0 {m0} m1 {m1} se {se}");
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(-14.0) - 10f64.powf(-1.4)).abs() < 1e-15);
        assert!((linear_to_db(db_to_linear(-12.5)) + 12.5).abs() < 1e-12);
    }
}
