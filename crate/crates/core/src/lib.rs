//! Exact large-order perturbation coefficients for four eigenvalue model
//! problems, together with the closed-form late-term predictions they are
//! compared against and the sequence diagnostics used for the comparison.
//!
//! Every coefficient is an exact [`Rational`]; floating values only appear
//! when a prediction involving `π`, `√2` or a complex singulant is evaluated.

pub mod analysis;
pub mod asymptotics;
mod error;
pub mod numerics;
pub mod problems;

pub use error::{Error, Result};
pub use numerics::{BigFloat, ComplexBF, Integer, Rational};
pub use problems::{compute_series, CoefficientTable, EigenSeries, ProblemKind, ProblemSpec};
