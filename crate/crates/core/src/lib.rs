//! Exact symbolic Lie algebras of planar vector fields with
//! exponential-polynomial coefficients over the Gaussian rationals.

pub mod algebra;
pub mod catalog;
pub mod classify;
pub mod cli;
pub mod coeffring;
pub mod expr;
pub mod fields;
pub mod linalg;
pub mod scalar;
pub mod spectral;
#[cfg(test)]
mod testgen;
pub mod transform;
