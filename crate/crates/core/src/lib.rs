//! Two-level dipole scalar field theory: cavity dynamics, non-relativistic
//! reduction and one-loop cutoff renormalization.

// `!(x <= limit)` is how the checks reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod grid;
pub mod jc;
pub mod linalg;
pub mod loops;
pub mod model;
pub mod nr;
pub mod renorm;

pub use error::{Error, Result};
