//! Absolute-value pre-processing, the null CDF and the z-transform that every
//! goodness-of-fit statistic consumes.
//!
//! Under `H0`, `x = |Y|` is exponential with rate `sqrt(2 / variance)` and
//! `z = F0(x)` is uniform on `[0, 1]`.

use crate::error::{Error, Result};
use crate::signal::{NoiseParams, SampleBlock};

/// Smallest z value kept after the transform, so `ln z` stays finite.
pub const Z_FLOOR: f64 = 1e-300;

/// `|Y_i|` elementwise, order preserved.
pub fn flom_abs(block: &SampleBlock) -> Vec<f64> {
    block.samples().iter().map(|y| y.abs()).collect()
}

/// Null CDF of `x = |W|`, `F0(x) = 1 - exp(-sqrt(2 / variance) x)`.
pub fn theoretical_cdf(x: f64, noise: &NoiseParams) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(
            "theoretical_cdf",
            format!("x must be >= 0, got {x}"),
        ));
    }
    Ok(cdf_unchecked(x, noise.rate()))
}

#[inline]
fn cdf_unchecked(x: f64, rate: f64) -> f64 {
    -(-rate * x).exp_m1()
}

/// Inverse of [`theoretical_cdf`]: `x = -sqrt(variance / 2) ln(1 - z)`.
pub fn inverse_cdf(z: f64, noise: &NoiseParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain(
            "inverse_cdf",
            format!("z must lie in [0, 1], got {z}"),
        ));
    }
    Ok(-noise.scale() * (-z).ln_1p())
}

/// Right-continuous empirical CDF: the fraction of `x_values` that are `<= query`.
pub fn empirical_cdf(x_values: &[f64], query: f64) -> Result<f64> {
    if x_values.is_empty() {
        return Err(Error::domain("empirical_cdf", "needs a nonempty sample"));
    }
    let count = x_values.iter().filter(|&&x| x <= query).count();
    Ok(count as f64 / x_values.len() as f64)
}

/// Absolute values of a block together with their null-CDF images.
#[derive(Debug, Clone, PartialEq)]
pub struct ZBlock {
    z: Vec<f64>,
    x: Vec<f64>,
    noise: NoiseParams,
}

impl ZBlock {
    /// Values of `F0(|Y_i|)` in the original sample order, clamped to `[Z_FLOOR, 1]`.
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn noise(&self) -> &NoiseParams {
        &self.noise
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Builds a z-block from precomputed z values, applying the same clamp as
    /// [`z_transform`]. The matching `x` values are recovered by the inverse CDF.
    pub fn from_z(z: Vec<f64>, noise: NoiseParams) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::domain("ZBlock::from_z", "needs n >= 1 values"));
        }
        let mut clamped = Vec::with_capacity(z.len());
        let mut x = Vec::with_capacity(z.len());
        for &v in &z {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(
                    "ZBlock::from_z",
                    format!("z out of [0, 1]: {v}"),
                ));
            }
            x.push(inverse_cdf(v, &noise)?);
            clamped.push(v.max(Z_FLOOR));
        }
        Ok(Self {
            z: clamped,
            x,
            noise,
        })
    }
}

/// `z_i = F0(|Y_i|)` in sample order, clamped below at [`Z_FLOOR`].
pub fn z_transform(block: &SampleBlock, noise: &NoiseParams) -> ZBlock {
    z_transform_slice(block.samples(), noise)
}

/// [`z_transform`] over raw samples, for callers that manage their own buffers.
pub fn z_transform_slice(samples: &[f64], noise: &NoiseParams) -> ZBlock {
    let rate = noise.rate();
    let x: Vec<f64> = samples.iter().map(|y| y.abs()).collect();
    let z = x
        .iter()
        .map(|&xi| cdf_unchecked(xi, rate).max(Z_FLOOR))
        .collect();
    ZBlock {
        z,
        x,
        noise: *noise,
    }
}
