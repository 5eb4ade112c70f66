//! Test statistics for the ULAD detector and the six baselines, plus the
//! threshold decision rule.
//!
//! Every detector rejects `H0` for large statistic values. ULAD needs one
//! unsorted pass over the z values; KS, CM and AD sort a copy first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gof::{z_transform, ZBlock};
use crate::signal::{Hypothesis, NoiseParams, SampleBlock};

/// Upper clamp for z inside the AD statistic so `ln(1 - z)` stays finite.
pub const AD_Z_CEILING: f64 = 1.0 - 1e-15;

/// Operation counters used to check the complexity claims of each statistic
/// without timing anything. Counts are per thread.
pub mod instrument {
    use std::cell::Cell;

    #[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
    pub struct OpCounts {
        /// Linear passes over the input.
        pub passes: u64,
        /// Elements touched by those passes.
        pub elements_visited: u64,
        /// Sort calls.
        pub sorts: u64,
        /// Elements handed to those sorts.
        pub sorted_elements: u64,
    }

    thread_local! {
        static COUNTS: Cell<OpCounts> = Cell::new(OpCounts::default());
    }

    pub fn reset() {
        COUNTS.with(|c| c.set(OpCounts::default()));
    }

    pub fn snapshot() -> OpCounts {
        COUNTS.with(|c| c.get())
    }

    /// Runs `f` with fresh counters and returns what it recorded.
    pub fn measure<R>(f: impl FnOnce() -> R) -> (R, OpCounts) {
        let saved = snapshot();
        reset();
        let out = f();
        let counts = snapshot();
        COUNTS.with(|c| c.set(saved));
        (out, counts)
    }

    pub(crate) fn record_pass(n: usize) {
        COUNTS.with(|c| {
            let mut v = c.get();
            v.passes += 1;
            v.elements_visited += n as u64;
            c.set(v);
        });
    }

    pub(crate) fn record_sort(n: usize) {
        COUNTS.with(|c| {
            let mut v = c.get();
            v.sorts += 1;
            v.sorted_elements += n as u64;
            c.set(v);
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "p", rename_all = "snake_case")]
pub enum DetectorKind {
    Ulad,
    Ks,
    Cm,
    Ad,
    /// Energy detector, `sum |Y|^2`.
    Ed,
    /// Absolute value cumulation, `sum |Y|`.
    Avc,
    /// p-th order moment, `sum |Y|^p` with `0 < p < 2`.
    Pom(f64),
}

impl DetectorKind {
    pub fn pom(p: f64) -> Result<Self> {
        let kind = DetectorKind::Pom(p);
        kind.validate()?;
        Ok(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DetectorKind::Pom(p) if !(p > 0.0 && p < 2.0) => Err(Error::param(
                "pom exponent",
                format!("must lie in (0, 2), got {p}"),
            )),
            _ => Ok(()),
        }
    }

    /// Whether the statistic is computed from z values rather than raw samples.
    pub fn uses_z(&self) -> bool {
        matches!(
            self,
            DetectorKind::Ulad | DetectorKind::Ks | DetectorKind::Cm | DetectorKind::Ad
        )
    }

    /// The baselines compared against ULAD in the detector ranking experiments.
    pub fn baselines() -> [DetectorKind; 8] {
        [
            DetectorKind::Pom(0.05),
            DetectorKind::Pom(0.2),
            DetectorKind::Avc,
            DetectorKind::Ks,
            DetectorKind::Ad,
            DetectorKind::Cm,
            DetectorKind::Pom(1.5),
            DetectorKind::Ed,
        ]
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectorKind::Ulad => write!(f, "ulad"),
            DetectorKind::Ks => write!(f, "ks"),
            DetectorKind::Cm => write!(f, "cm"),
            DetectorKind::Ad => write!(f, "ad"),
            DetectorKind::Ed => write!(f, "ed"),
            DetectorKind::Avc => write!(f, "avc"),
            DetectorKind::Pom(p) => write!(f, "pom({p})"),
        }
    }
}

/// Parses `ulad`, `ks`, `cm`, `ad`, `ed`, `avc`, `pom` (p = 1.5) or `pom:<p>`.
impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let kind = match lower.as_str() {
            "ulad" => DetectorKind::Ulad,
            "ks" => DetectorKind::Ks,
            "cm" => DetectorKind::Cm,
            "ad" => DetectorKind::Ad,
            "ed" => DetectorKind::Ed,
            "avc" => DetectorKind::Avc,
            "pom" => DetectorKind::Pom(1.5),
            other => {
                let p = other
                    .strip_prefix("pom:")
                    .or_else(|| other.strip_prefix("pom(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(|| Error::param("detector", format!("unknown detector `{s}`")))?;
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::param("detector", format!("bad POM exponent in `{s}`")))?;
                DetectorKind::Pom(p)
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorStatistic {
    pub value: f64,
    pub kind: DetectorKind,
    pub n: usize,
}

impl DetectorStatistic {
    fn new(value: f64, kind: DetectorKind, n: usize) -> Self {
        debug_assert!(value.is_finite(), "{kind} statistic is not finite: {value}");
        Self { value, kind, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Hypothesis,
    pub statistic: DetectorStatistic,
    pub threshold: f64,
}

/// `B_n = n + sum ln z_i`, one pass and no sort.
pub fn ulad_statistic(zb: &ZBlock) -> DetectorStatistic {
    let z = zb.z();
    instrument::record_pass(z.len());
    let log_sum: f64 = z.iter().map(|v| v.ln()).sum();
    DetectorStatistic::new(z.len() as f64 + log_sum, DetectorKind::Ulad, z.len())
}

fn sorted_z(zb: &ZBlock) -> Vec<f64> {
    let mut z = zb.z().to_vec();
    instrument::record_sort(z.len());
    z.sort_unstable_by(f64::total_cmp);
    z
}

/// Kolmogorov-Smirnov distance `sup |F_n - F0|` on the z scale.
pub fn ks_statistic(zb: &ZBlock) -> DetectorStatistic {
    let z = sorted_z(zb);
    let n = z.len() as f64;
    instrument::record_pass(z.len());
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let upper = (i + 1) as f64 / n - zi;
            let lower = zi - i as f64 / n;
            upper.max(lower)
        })
        .fold(0.0, f64::max);
    DetectorStatistic::new(d, DetectorKind::Ks, z.len())
}

/// Cramer-von Mises `W^2 = sum (z_(i) - (2i-1)/2n)^2 + 1/12n`.
pub fn cm_statistic(zb: &ZBlock) -> DetectorStatistic {
    let z = sorted_z(zb);
    let n = z.len() as f64;
    instrument::record_pass(z.len());
    let sum: f64 = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let d = zi - (2 * i + 1) as f64 / (2.0 * n);
            d * d
        })
        .sum();
    DetectorStatistic::new(sum + 1.0 / (12.0 * n), DetectorKind::Cm, z.len())
}

/// Anderson-Darling `A^2`, pairing the i-th order statistic with the
/// (n+1-i)-th.
pub fn ad_statistic(zb: &ZBlock) -> DetectorStatistic {
    let mut z = sorted_z(zb);
    for v in z.iter_mut() {
        *v = v.min(AD_Z_CEILING);
    }
    let n = z.len();
    instrument::record_pass(n);
    let sum: f64 = (0..n)
        .map(|i| {
            let weight = (2 * i + 1) as f64;
            weight * (z[i].ln() + (-z[n - 1 - i]).ln_1p())
        })
        .sum();
    DetectorStatistic::new(-sum / n as f64 - n as f64, DetectorKind::Ad, n)
}

/// `sum |Y_i|^p`, left unnormalized. `p = 2` is the energy detector and `p = 1` AVC.
pub fn moment_statistic(block: &SampleBlock, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param(
            "moment exponent",
            format!("must be > 0, got {p}"),
        ));
    }
    Ok(moment_sum(block.samples(), p))
}

fn moment_sum(samples: &[f64], p: f64) -> f64 {
    instrument::record_pass(samples.len());
    if p == 1.0 {
        samples.iter().map(|y| y.abs()).sum()
    } else if p == 2.0 {
        samples.iter().map(|y| y * y).sum()
    } else {
        samples.iter().map(|y| y.abs().powf(p)).sum()
    }
}

/// Computes the statistic of `kind` from a z-block. Moment detectors read the
/// absolute values kept in the block.
pub fn statistic_from_z(kind: DetectorKind, zb: &ZBlock) -> Result<DetectorStatistic> {
    kind.validate()?;
    Ok(match kind {
        DetectorKind::Ulad => ulad_statistic(zb),
        DetectorKind::Ks => ks_statistic(zb),
        DetectorKind::Cm => cm_statistic(zb),
        DetectorKind::Ad => ad_statistic(zb),
        DetectorKind::Ed => DetectorStatistic::new(moment_sum(zb.x(), 2.0), kind, zb.n()),
        DetectorKind::Avc => DetectorStatistic::new(moment_sum(zb.x(), 1.0), kind, zb.n()),
        DetectorKind::Pom(p) => DetectorStatistic::new(moment_sum(zb.x(), p), kind, zb.n()),
    })
}

/// Computes the statistic of `kind` for a raw block.
pub fn compute_statistic(
    kind: DetectorKind,
    block: &SampleBlock,
    noise: &NoiseParams,
) -> Result<DetectorStatistic> {
    kind.validate()?;
    let n = block.n();
    Ok(match kind {
        DetectorKind::Ed => DetectorStatistic::new(moment_statistic(block, 2.0)?, kind, n),
        DetectorKind::Avc => DetectorStatistic::new(moment_statistic(block, 1.0)?, kind, n),
        DetectorKind::Pom(p) => DetectorStatistic::new(moment_statistic(block, p)?, kind, n),
        _ => statistic_from_z(kind, &z_transform(block, noise))?,
    })
}

/// `H1` iff the statistic reaches the threshold (the boundary counts as `H1`).
pub fn decide(statistic: DetectorStatistic, threshold: f64) -> Result<Decision> {
    if !threshold.is_finite() {
        return Err(Error::domain(
            "decide",
            format!("threshold must be finite, got {threshold}"),
        ));
    }
    let verdict = if statistic.value >= threshold {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    };
    Ok(Decision {
        verdict,
        statistic,
        threshold,
    })
}
