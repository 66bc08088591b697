//! Empirical side: sensing matrices, restricted isometry constants, lq
//! minimization by IRLS, null space property probes, the `tau` ratio and the
//! block inequalities behind it, and phase-transition experiments.
//!
//! Randomness is seeded per task (see [`crate::rng`]), so every result is
//! independent of the number of worker threads.

mod audit;
mod experiment;
mod irls;
mod matrix;
mod nsp;
mod nullspace;
mod partition;
mod ric;
mod sweep;

pub use audit::{block_bound_audit, AuditReport};
pub use experiment::{
    phase_csv, phase_transition, relative_error, sparse_instance, Ensemble, Instance, PhaseConfig, PhaseRow,
    SUCCESS_TOL,
};
pub use irls::{irls_lq, IrlsOptions, RecoveryResult};
pub use matrix::{MatrixSource, SensingMatrix};
pub use nsp::{nsp_check, NspReport};
pub use nullspace::{null_space_basis, NullSpaceBasis};
pub use partition::{tau_ratio, tau_ratio_blocks, SupportPartition, TauStats};
pub use ric::{
    binomial, ric_exact, ric_exact_capped, ric_monte_carlo, sample_subset, RicEstimate, RicMethod,
    ENUMERATION_CAP,
};
pub use sweep::{lemma3_sweep, lemma3_vector, Lemma3Sweep};
