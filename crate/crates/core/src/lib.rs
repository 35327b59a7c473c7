//! Dispersion-minimizing quadrature for C1 quadratic isogeometric analysis.
//!
//! The crate builds quadratic B-spline spaces, assembles stiffness and mass
//! matrices under a choice of quadrature rules, evaluates the discrete
//! dispersion relation of the resulting stencils and solves the Laplace
//! eigenproblem on the unit interval and square.

pub mod assembly;
pub mod cli;
pub mod dispersion;
pub mod eigen;
pub mod error;
pub mod fit;
pub mod quadrature;
pub mod spline;

pub use error::{Error, Result};
