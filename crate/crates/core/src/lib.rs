//! Group Lasso estimation, tuning, design diagnostics, support recovery and
//! a Monte Carlo harness for checking the accompanying error bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod model;
pub mod recovery;
pub mod rng;
pub mod simulate;
pub mod solver;
pub mod tuning;

pub use nalgebra;

pub use diagnostics::{
    coherence_alpha, cone_ratios, diagnose, re_from_coherence, re_sampled, restricted_eigenvalues, x_star,
    DiagnoseOptions, DiagnosticsReport,
};
pub use error::{Error, Result};
pub use model::{
    assemble_multitask, gram_summary, mixed_norm, multitask_gram_summary, multitask_partition, GramSummary,
    GroupPartition, MultiTaskSpec, Problem, RegressionData,
};
pub use recovery::{estimate_support, min_signal_ok, pnorm_radius, SupportEstimate};
pub use solver::{
    group_prox, kkt_residual, objective, solve_group_lasso, solve_lasso, solve_quadratic, QuadraticLoss,
    SolveOptions, SolveResult,
};
pub use tuning::{
    lambda_groups, lambda_multitask, lambda_nongaussian, moment_constant, threshold_constants, Regime, Tuning,
};
