//! Sieve functions f = g ∗ 1 at desk scale.
//!
//! This crate computes, exactly where it matters:
//!
//! * the sieve f = g ∗ 1 of a finitely supported rational g ([`arith`]);
//! * the Selberg and symmetry integrals of f over short intervals, reduced
//!   to unit-interval sums and cross-checked by a sampling oracle
//!   ([`integrals`]);
//! * autocorrelations of f with their exact main-term/remainder split and
//!   the equivalent additive-character form ([`correlations`]);
//! * the W and S correlation weights with their closed-form exponential
//!   sums ([`kernels`]);
//! * residual reports tying the integrals to weighted correlation sums,
//!   plus calibration and scaling-grid experiments ([`verify`]).
//!
//! Arithmetic is generic over [`scalar::Scalar`]: exact rationals by
//! default, f64 for large-scale runs. All parallel reductions use fixed
//! partitions ([`parallel`]), so exact results are bit-identical for any
//! worker count and float results are reproducible run-to-run.

pub mod arith;
pub mod correlations;
pub mod error;
pub mod integrals;
pub mod kernels;
pub mod parallel;
pub mod scalar;
pub mod verify;

pub use arith::{
    dyadic_sum, dyadic_sum_closed, make_g, mean_value, sieve_f, sieve_for_experiment, GFunction,
    Preset, ScaleParams, SieveTable,
};
pub use correlations::{
    correlation_direct, correlation_main_term, remainder_charsum, remainder_exact,
    weighted_corr_sum, weighted_remainder_charsum, weighted_remainder_sum, CorrelationTable,
};
pub use error::{Error, Result};
pub use integrals::{quadrature_oracle, selberg_integral, symmetry_integral, IntegralKind, IntegralResult};
pub use kernels::{KernelFamily, KernelSpec};
pub use scalar::{Rat, Scalar};
pub use verify::{
    check_lemma1, check_lemma2, check_theorem_i_rep, run_grid, ExperimentRecord, GridConfig,
    Lemma, Mode, ResidualReport,
};
