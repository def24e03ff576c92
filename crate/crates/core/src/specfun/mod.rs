//! Special functions, semi-infinite quadrature and the two-parameter root
//! solver behind every analytic rate expression in this crate.
//!
//! Everything here is a pure function of its arguments.

mod expint;
mod gamma;
mod quadrature;
mod roots;

pub use expint::{exp_scaled_e1, expint_e1};
pub use gamma::{
    harmonic, ln_gamma, ln_reg_lower_gamma, reg_lower_gamma, reg_upper_gamma, std_normal_cdf, std_normal_sf,
};
pub use quadrature::{integrate_semi_infinite, QuadratureSpec};
pub use roots::{solve_moment_system, SearchBox};

/// Euler–Mascheroni constant, the limit of `H_n - ln n`.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_860_6;

pub use std::f64::consts::PI;
