//! Spectrum sensing under Laplacian noise with the unilateral left-tail
//! Anderson-Darling (ULAD) detector.
//!
//! The crate covers the whole pipeline:
//!
//! - [`signal`]: Laplacian noise, primary-user waveforms, labelled blocks.
//! - [`gof`]: `|Y|` pre-processing, the null CDF and the z-transform.
//! - [`detectors`]: ULAD, KS, CM, AD, ED, AVC and POM statistics and decisions.
//! - [`analytic`]: closed-form `Pf` and `Pd` of ULAD and the threshold for a given `Pf`.
//! - [`threshold`]: the total-error-minimizing threshold under a `Pf` ceiling.
//! - [`mc`]: reproducible, parallel Monte Carlo estimation.
//!
//! ```
//! use ulad_core::{analytic, detectors, gof, signal::{NoiseParams, SampleBlock}};
//!
//! let noise = NoiseParams::unit();
//! let block = SampleBlock::observed(vec![0.3, -1.2, 0.05, 2.4]).unwrap();
//! let stat = detectors::ulad_statistic(&gof::z_transform(&block, &noise));
//! let gamma = analytic::threshold_from_pf(0.05, block.n()).unwrap();
//! let decision = detectors::decide(stat, gamma).unwrap();
//! println!("{:?}", decision.verdict);
//! ```

pub mod analytic;
pub mod detectors;
pub mod error;
pub mod gof;
pub mod mc;
pub mod signal;
pub mod threshold;

pub use error::{Error, Result};
