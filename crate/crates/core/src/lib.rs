//! Higher Criticism and Innovated Higher Criticism for detecting sparse,
//! weak signals in correlated Gaussian noise.
//!
//! The crate is organised bottom-up: [`matrix`] and [`spectral`] provide the
//! numerical kernels, [`corr`] builds and whitens correlation matrices,
//! [`signal`] generates data, [`hc`] computes statistics and boundaries, and
//! [`simlab`] runs seeded Monte Carlo experiments.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corr;
pub mod error;
pub mod exec;
pub mod hc;
pub mod matrix;
pub mod signal;
pub mod simlab;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use matrix::Matrix;
