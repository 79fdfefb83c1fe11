//! Spectra of kernelized truncated covariance matrices.
//!
//! * [`ensemble`] builds data matrices, kernel graphs and the matrices M, E, M̄.
//! * [`spectra`] extracts eigenvalues and compares spectra with laws.
//! * [`laws`] evaluates the limiting laws and solves the Stieltjes fixed point.
//! * [`harness`] runs seeded experiments and writes artifacts.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod ensemble;
pub mod harness;
pub mod error;
pub mod exec;
pub mod laws;
pub mod linalg;
pub mod rng;
pub mod spectra;

pub use error::{Result, RmtError};
pub use exec::Exec;
