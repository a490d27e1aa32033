//! Numeric side: jets of the level system, the branch-point solver that
//! locates the dominant singularities, and coefficient asymptotics.

mod asymptotics;
mod branch;
mod evaluator;
mod jet;
mod scalar;
mod tree;

use thiserror::Error;

pub use asymptotics::{
    class_coefficients, constant_estimate, constant_estimate_with, growth_constant, ln_ratio,
    ratio_estimate, ratio_estimate_with, richardson, richardson_f64, RatioEstimate, DEFAULT_ORDER,
    MIN_TERMS,
};
pub use branch::{branch_point, branch_row, table, BranchPoint, RESIDUAL_TOL};
pub use evaluator::{eval_level, eval_top, Evaluator, LevelValues, TopValues};
pub use jet::{Jet, JetSpace};
pub use scalar::{DoubleDouble, Scalar};
pub use tree::{tree_t, tree_t_jet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{what}: point {at} lies beyond the singularity")]
    BeyondSingularity { what: &'static str, at: f64 },
    #[error("{what} did not converge in {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("no branch point found for t={t}, k={k}")]
    NoBranchPoint { t: usize, k: usize },
    #[error("residual {residual:e} too large at t={t}, k={k}")]
    Residual { t: usize, k: usize, residual: f64 },
    #[error("only {0} usable coefficients")]
    TooFewTerms(usize),
    #[error("zero coefficient at n = {0}")]
    ZeroCoefficient(usize),
    #[error("invalid arguments: {0}")]
    BadArgs(String),
    #[error(transparent)]
    System(#[from] crate::gfsystem::SystemError),
}

pub type Result<T, E = SolveError> = std::result::Result<T, E>;
