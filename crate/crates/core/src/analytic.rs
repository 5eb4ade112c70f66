//! Closed-form false-alarm and detection probabilities of the ULAD detector.
//!
//! By the central limit theorem `B_n ~ N(n + n E[ln z], n D[ln z])`. Under
//! `H0`, z is uniform and `ln z` has mean -1 and variance 1. Under `H1` the
//! moments depend on `q = exp(-sqrt(2 rho / variance))` and `C = 1 - q`; the
//! exact second moment carries the dilogarithm series `sum C^i / i^2`, and the
//! approximate one replaces it with its geometric upper bound `C / (1 - C)`.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::NoiseParams;

/// Number of series terms used for the exact second moment unless configured.
pub const DEFAULT_K_MAX: usize = 1000;

/// Standard normal upper-tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`q_function`], by Newton iteration on `ln Q` kept inside a
/// bisection bracket.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(
            "q_inverse",
            format!("p must lie in (0, 1), got {p}"),
        ));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1].
        return Ok(-upper_tail_root(1.0 - p));
    }
    Ok(upper_tail_root(p))
}

/// Root `x >= 0` of `Q(x) = p` for `0 < p < 0.5`.
fn upper_tail_root(p: f64) -> f64 {
    let target = p.ln();
    let mut lo = 0.0;
    let mut hi = 1.0;
    while q_function(hi) > p {
        lo = hi;
        hi *= 2.0;
        if hi > 64.0 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let qx = q_function(x);
        if qx > p {
            lo = x;
        } else {
            hi = x;
        }
        let next = if qx > 0.0 {
            // d ln Q / dx = -phi(x) / Q(x)
            x + (qx.ln() - target) * qx / std_normal_pdf(x)
        } else {
            f64::NAN
        };
        let next = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// Mean, second raw moment and variance of `ln z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnzMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Moments of `ln z` under `H0`, where z is uniform on `[0, 1]`.
pub fn h0_moments() -> LnzMoments {
    LnzMoments {
        mean: -1.0,
        second_moment: 2.0,
        variance: 1.0,
    }
}

/// Which variance the detection probability uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdMode {
    /// Truncated dilogarithm series in the second moment.
    Exact,
    /// Series replaced by its upper bound `C / (1 - C)`.
    Approx,
}

/// `sum_{i=1}^{k} c^i / i^2`, the partial sum of the dilogarithm `Li2(c)`.
pub fn dilog_partial_sum(c: f64, k_max: usize) -> f64 {
    let mut power = 1.0;
    let mut sum = 0.0;
    for i in 1..=k_max {
        power *= c;
        if power == 0.0 {
            break;
        }
        let i = i as f64;
        sum += power / (i * i);
    }
    sum
}

/// Moments of `ln z` under `H1` for one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UladAnalytic {
    pub q: f64,
    pub c: f64,
    pub mean_lnz_h1: f64,
    pub e2_lnz_h1: f64,
    pub var_lnz_h1: f64,
    pub e2_lnz_h1_approx: f64,
    pub var_lnz_h1_approx: f64,
    pub k_max: usize,
}

impl UladAnalytic {
    /// Evaluates the `H1` moments at linear SNR `rho > 0`.
    pub fn h1_moments(rho: f64, noise: &NoiseParams, k_max: usize) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::domain(
                "h1_moments",
                format!("rho must be finite and > 0 (use h0_moments for rho = 0), got {rho}"),
            ));
        }
        let a = (2.0 * rho / noise.variance()).sqrt();
        Self::from_parts((-a).exp(), -(-a).exp_m1(), k_max)
    }

    /// Evaluates the `H1` moments directly from `q` in `(0, 1)`.
    pub fn from_q(q: f64, k_max: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(
                "from_q",
                format!("q must lie in (0, 1), got {q}"),
            ));
        }
        Self::from_parts(q, 1.0 - q, k_max)
    }

    fn from_parts(q: f64, c: f64, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::domain("h1_moments", "k_max must be >= 1"));
        }
        if !(q >= f64::MIN_POSITIVE) {
            return Err(Error::domain(
                "h1_moments",
                "SNR too large: q underflows and the moments are not representable",
            ));
        }
        if !(c > 0.0) {
            return Err(Error::domain(
                "h1_moments",
                "SNR too small: C rounds to zero",
            ));
        }
        let ln_q = q.ln();
        let ln_c = c.ln();

        // Mean rewritten with 1 - C = q so nothing cancels as rho -> 0.
        let mean = -0.5 * (1.0 + q) + 0.5 * q * ln_q - c * c * ln_c / (2.0 * q);

        let common = -c * c / (2.0 * q) * ln_c * ln_c + q * ln_c * ln_q + c / q * ln_c;
        let e2 = common + q * dilog_partial_sum(c, k_max) + 1.0 + q;
        let e2_approx = common + 2.0;

        Ok(Self {
            q,
            c,
            mean_lnz_h1: mean,
            e2_lnz_h1: e2,
            var_lnz_h1: e2 - mean * mean,
            e2_lnz_h1_approx: e2_approx,
            var_lnz_h1_approx: e2_approx - mean * mean,
            k_max,
        })
    }

    pub fn variance(&self, mode: PdMode) -> f64 {
        match mode {
            PdMode::Exact => self.var_lnz_h1,
            PdMode::Approx => self.var_lnz_h1_approx,
        }
    }

    pub fn moments(&self, mode: PdMode) -> LnzMoments {
        let (e2, var) = match mode {
            PdMode::Exact => (self.e2_lnz_h1, self.var_lnz_h1),
            PdMode::Approx => (self.e2_lnz_h1_approx, self.var_lnz_h1_approx),
        };
        LnzMoments {
            mean: self.mean_lnz_h1,
            second_moment: e2,
            variance: var,
        }
    }
}

/// False-alarm probability `Q(gamma / sqrt(n))`.
pub fn pf_ulad(gamma: f64, n: usize) -> f64 {
    q_function(gamma / (n as f64).sqrt())
}

/// Threshold achieving false-alarm probability `pf`, `Q^-1(pf) sqrt(n)`.
pub fn threshold_from_pf(pf: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("threshold_from_pf", "n must be >= 1"));
    }
    Ok(q_inverse(pf)? * (n as f64).sqrt())
}

/// Detection probability `Q((gamma - n - n E) / sqrt(n D))`.
pub fn pd_ulad(gamma: f64, n: usize, moments: &UladAnalytic, mode: PdMode) -> Result<f64> {
    let var = moments.variance(mode);
    if !(var > 0.0) {
        return Err(Error::Numeric(format!(
            "variance of ln z under H1 must be positive, got {var} ({mode:?})"
        )));
    }
    let n = n as f64;
    let mean = n + n * moments.mean_lnz_h1;
    Ok(q_function((gamma - mean) / (n * var).sqrt()))
}

/// Detection probability at linear SNR `rho >= 0`; at `rho = 0` it equals `Pf`.
pub fn pd_ulad_at_snr(
    gamma: f64,
    n: usize,
    rho: f64,
    noise: &NoiseParams,
    k_max: usize,
    mode: PdMode,
) -> Result<f64> {
    if rho == 0.0 {
        return Ok(pf_ulad(gamma, n));
    }
    let m = UladAnalytic::h1_moments(rho, noise, k_max)?;
    pd_ulad(gamma, n, &m, mode)
}
