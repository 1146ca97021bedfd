//! Stancu-type q-Baskakov and q-Baskakov-Kantorovich operators.
//!
//! The crate is organized around a small q-calculus core ([`qcalc`]), the
//! operator family itself ([`operators`]), closed-form moment oracles
//! ([`moments`]), statistical-convergence experiment harnesses ([`statconv`]),
//! modulus-of-continuity rate bounds ([`rates`]), the bivariate tensor
//! extension ([`bivariate`]), and a config-driven experiment CLI ([`cli`]).

pub mod bivariate;
pub mod cli;
pub mod error;
pub mod functions;
pub mod moments;
pub mod operators;
pub mod qcalc;
pub mod rates;
pub mod statconv;

pub use error::{Error, Result};
pub use operators::{OperatorSpec, StancuParams};
pub use qcalc::{QParam, TruncationPolicy};
