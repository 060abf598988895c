//! Sinusoidally driven two-level systems and their multi-level avoided
//! crossings: numerical propagation, Floquet quasienergies, the closed-form
//! Bessel-series propagator and step-structure analysis of the population
//! dynamics.
//!
//! Units have `hbar = 1`; every frequency is angular.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic_model;
pub mod bessel;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod multilevel;
pub mod operators;
pub mod propagator;
pub mod tls_model;

pub use error::{Error, Result};
pub use operators::{CMatrix, CVector, HermitianOperator, StateVector, UnitaryOperator};
pub use tls_model::DriveParams;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/two-level.md")]
    mod two_level {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/analytic.md")]
    mod analytic {}
    #[doc = include_str!("../../../book/src/multilevel.md")]
    mod multilevel {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
