//! Certified verification of restricted-isometry sufficient conditions for
//! sparse recovery by lq quasi-norm minimization, together with an empirical
//! sparse-recovery toolkit.
//!
//! The crate is organised in four layers:
//!
//! * [`scalar`] holds exact closed-form functions: the converse
//!   Cauchy-Schwarz constant `p_q`, the sufficient-condition function
//!   `r(t, q, delta)` and its three monotone pieces, the small-`t` boundary
//!   `B(q)` and the `q = 1` threshold.
//! * [`interval`] is an outward-rounded interval type implementing the same
//!   [`Real`] trait as `f64`, so every closed form has one code path for both
//!   float and rigorous evaluation.
//! * [`certify`] scans rectangular meshes with monotone corner bounds and
//!   composes the analytic exclusions into certificates.
//! * [`recovery`] generates sensing matrices, estimates RICs, solves lq
//!   minimization by IRLS, probes the null space property and runs
//!   phase-transition experiments.

pub mod certify;
pub mod error;
pub mod format;
pub mod interval;
pub mod real;
pub mod recovery;
pub mod rng;
pub mod scalar;

pub use certify::{
    Cell, Certificate, Mode, PartitionSpec, Verdict, VerifyOptions, Witness,
};
pub use error::{Error, Result};
pub use interval::Interval;
pub use real::Real;
pub use recovery::{RecoveryResult, RicEstimate, SensingMatrix, SupportPartition, TauStats};
pub use scalar::{QExponent, RatioT, RicParam};

/// Version string recorded in certificates.
pub const TOOL_VERSION: &str = concat!("lqcert ", env!("CARGO_PKG_VERSION"));
