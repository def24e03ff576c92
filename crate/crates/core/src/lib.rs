//! Ergodic-rate analysis of single transmit-antenna-selection links with
//! low-resolution ADCs.
//!
//! The crate pairs seeded Monte Carlo estimates of the quantized MRC rate
//! ([`link_sim`]) with the analytic approximations and bounds that predict
//! it ([`bounds`]), built on a generalized-Gamma fit of the Weibull sums
//! that drive the quantization noise ([`weibull_sum`]) and the AQNM
//! distortion model ([`quantization`]).
//!
//! Monte Carlo work runs on rayon when the default `parallel` feature is
//! enabled; results are bit-identical to the sequential build.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod link_sim;
pub mod montecarlo;
pub mod quantization;
pub mod specfun;
pub mod weibull_sum;

pub use error::{Error, Result};

/// Decibels to linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
