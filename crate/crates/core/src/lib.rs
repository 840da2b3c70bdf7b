//! Scale calculus of variations on non-differentiable curves.

pub mod asymptotics;
pub mod curves;
pub mod error;
pub mod experiment;
pub mod qcalc;
pub mod quadrature;
pub mod schrodinger;
pub mod variational;

pub use error::{Error, Result};
