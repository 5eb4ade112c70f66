//! Threshold that minimizes the total error rate `Pf + (1 - Pd)` subject to
//! an upper bound on `Pf`.
//!
//! Setting the derivative of the total error (with the approximate detection
//! probability) to zero gives the quadratic `alpha g^2 + beta g + mu = 0` with
//!
//! ```text
//! alpha = omega^2 - 1
//! beta  = 2 n (1 + E)
//! mu    = -n^2 [ (1 + E)^2 + (omega^2 / n) ln omega^2 ]
//! ```
//!
//! where `E` is the `H1` mean of `ln z` and `omega^2` the approximate variance.

use serde::{Deserialize, Serialize};

use crate::analytic::{pd_ulad, pf_ulad, threshold_from_pf, PdMode, UladAnalytic};
use crate::error::{Error, Result};

/// `|alpha|` below this is treated as zero and the linear root is used.
pub const ALPHA_ZERO_TOL: f64 = 1e-9;

/// False-alarm ceiling used when none is configured.
pub const DEFAULT_ZETA_PF: f64 = 0.1;

/// `Pf + 1 - Pd` using the approximate detection probability.
pub fn total_error_rate(gamma: f64, n: usize, moments: &UladAnalytic) -> Result<f64> {
    let pf = pf_ulad(gamma, n);
    let pd = pd_ulad(gamma, n, moments, PdMode::Approx)?;
    Ok(pf + 1.0 - pd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOpt {
    pub n: usize,
    pub moments: UladAnalytic,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub delta: f64,
    pub omega: f64,
    /// Unconstrained minimizer, filled by [`gamma_unconstrained`] / [`gamma_star`].
    pub gamma_min: Option<f64>,
    pub pf_at_gamma_min: Option<f64>,
    /// Constrained optimum, filled by [`gamma_star`].
    pub gamma_star: Option<f64>,
    pub pf_at_gamma_star: Option<f64>,
    pub zeta_pf: Option<f64>,
}

impl ThresholdOpt {
    /// Whether the false-alarm ceiling moved the optimum off the stationary point.
    pub fn constraint_binds(&self) -> Option<bool> {
        match (self.gamma_min, self.gamma_star) {
            (Some(a), Some(b)) => Some(a != b),
            _ => None,
        }
    }

    pub fn quadratic(&self, gamma: f64) -> f64 {
        (self.alpha * gamma + self.beta) * gamma + self.mu
    }
}

/// Coefficients of the stationarity quadratic.
pub fn opt_coefficients(n: usize, moments: &UladAnalytic) -> Result<ThresholdOpt> {
    if n == 0 {
        return Err(Error::domain("opt_coefficients", "n must be >= 1"));
    }
    let omega2 = moments.var_lnz_h1_approx;
    if !(omega2 > 0.0) {
        return Err(Error::Numeric(format!(
            "approximate H1 variance must be positive, got {omega2}"
        )));
    }
    let nf = n as f64;
    let shift = 1.0 + moments.mean_lnz_h1;
    let alpha = omega2 - 1.0;
    let beta = 2.0 * nf * shift;
    let mu = -nf * nf * (shift * shift + omega2 / nf * omega2.ln());
    Ok(ThresholdOpt {
        n,
        moments: *moments,
        alpha,
        beta,
        mu,
        delta: beta * beta - 4.0 * alpha * mu,
        omega: omega2.sqrt(),
        gamma_min: None,
        pf_at_gamma_min: None,
        gamma_star: None,
        pf_at_gamma_star: None,
        zeta_pf: None,
    })
}

/// Root of the stationarity quadratic selected as the minimizer.
///
/// For `alpha != 0` this is `(-beta + sqrt(delta)) / (2 alpha)`, evaluated as
/// `-2 mu / (beta + sqrt(delta))` to avoid cancellation; for `alpha = 0` it is
/// `-mu / beta`.
pub fn stationary_root(alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<f64> {
    let gamma = if alpha.abs() < ALPHA_ZERO_TOL {
        if !(beta > 0.0) {
            return Err(Error::Numeric(format!(
                "linear case needs beta > 0, got {beta}"
            )));
        }
        -mu / beta
    } else {
        if !(delta >= 0.0) {
            return Err(Error::Numeric(format!(
                "discriminant is negative ({delta}); moments are inconsistent"
            )));
        }
        let denom = beta + delta.sqrt();
        if denom == 0.0 {
            return Err(Error::Numeric(
                "degenerate quadratic: beta + sqrt(delta) = 0".into(),
            ));
        }
        -2.0 * mu / denom
    };
    if !gamma.is_finite() {
        return Err(Error::Numeric(format!(
            "optimal threshold is not finite: {gamma}"
        )));
    }
    Ok(gamma)
}

/// The stationary point of the total error, checked to be a local minimum.
pub fn gamma_unconstrained(coeffs: &ThresholdOpt) -> Result<f64> {
    let gamma = stationary_root(coeffs.alpha, coeffs.beta, coeffs.mu, coeffs.delta)?;
    let eps = 1e-3 * gamma.abs().max(1.0);
    let at = |g| total_error_rate(g, coeffs.n, &coeffs.moments);
    let centre = at(gamma)?;
    if at(gamma - eps)? < centre || at(gamma + eps)? < centre {
        return Err(Error::Numeric(format!(
            "stationary point {gamma} is not a minimum of the total error"
        )));
    }
    Ok(gamma)
}

/// Completes `coeffs` with the optimum under `Pf <= zeta_pf`: the stationary
/// point when it satisfies the ceiling, otherwise the threshold whose `Pf`
/// equals the ceiling.
pub fn gamma_star(coeffs: &ThresholdOpt, zeta_pf: f64) -> Result<ThresholdOpt> {
    if !(zeta_pf > 0.0 && zeta_pf < 1.0) {
        return Err(Error::domain(
            "gamma_star",
            format!("zeta_pf must lie in (0, 1), got {zeta_pf}"),
        ));
    }
    let n = coeffs.n;
    let gamma_min = gamma_unconstrained(coeffs)?;
    let pf_min = pf_ulad(gamma_min, n);
    let star = if pf_min <= zeta_pf {
        gamma_min
    } else {
        threshold_from_pf(zeta_pf, n)?
    };
    let mut out = *coeffs;
    out.gamma_min = Some(gamma_min);
    out.pf_at_gamma_min = Some(pf_min);
    out.gamma_star = Some(star);
    out.pf_at_gamma_star = Some(pf_ulad(star, n));
    out.zeta_pf = Some(zeta_pf);
    Ok(out)
}

/// Convenience: moments, coefficients and constrained optimum in one call.
pub fn optimal_threshold(
    rho: f64,
    noise: &crate::signal::NoiseParams,
    n: usize,
    k_max: usize,
    zeta_pf: f64,
) -> Result<ThresholdOpt> {
    let moments = UladAnalytic::h1_moments(rho, noise, k_max)?;
    gamma_star(&opt_coefficients(n, &moments)?, zeta_pf)
}
