//! Seeded ensembles, summary statistics, power-law fits and the z-score
//! checks behind the statistical acceptance runs.
//!
//! Trajectory `i` of an ensemble with base seed `b` always uses seed
//! `derive_seed(b, i)`, and per-trajectory values are reduced in index order
//! by a fixed pairwise tree, so an ensemble is bit-identical whether it runs
//! on one thread or many.

mod accumulator;
mod checks;
mod ensemble;
mod fit;
mod verdict;

pub use accumulator::{pairwise, MomentAccumulator};
pub use checks::{
    covariance_check, gaussianity_check, CovarianceCheck, GaussianityReport, MomentCheck, MIN_GAUSSIANITY_SAMPLES,
    Z_THRESHOLD,
};
pub use ensemble::{
    configure_threads, fingerprint, map_indices, run_ensemble, run_ensemble_with, EnsembleResult, Execution, Experiment,
};
pub use fit::{scaling_fit, ScalingFit, MIN_FIT_POINTS};
pub use verdict::{Verdict, VerdictDocument};
