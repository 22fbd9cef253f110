//! Kernel calculus, relaxation functions and decay verification for
//! nonlocal-in-time diffusion equations.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod linear;
pub mod nonlinear;
pub mod ode;
pub mod quadrature;
pub mod relaxation;
pub mod report;
pub mod special;

pub use error::{Error, Result};
