//! Rejection-based likelihood-free inference toolkit.
//!
//! The crate provides the building blocks of an approximate Bayesian
//! computation (ABC) analysis — smoothing kernels, distances between
//! summary vectors, generative models with named summary-statistic
//! schemes, and a family of rejection samplers — together with the
//! closed-form reference posteriors used to validate them and an
//! experiment harness with CSV output.

pub mod coalescent;
pub mod error;
pub mod metrics;
pub mod models;
pub mod kernels;
pub mod oracles;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use kernels::SmoothingKernel;
