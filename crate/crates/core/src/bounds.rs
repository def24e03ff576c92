//! Analytic ergodic-rate expressions for transmit antenna selection under
//! coarse quantization.
//!
//! * [`tas_lower_bound`]: approximate lower bound for any `N_r`, from the
//!   norm-maximizing and quartic-maximizing order statistics.
//! * [`tas_rate_nr1`] / [`tas_rate_nr1_asymptotic`]: closed-form
//!   approximation for one receive antenna, and its `ln N_t + γ_e` form.
//! * [`siso_upper_bound`] / [`siso_exact_rate`]: the `N_t = N_r = 1` link.
//!
//! For `N_r = 1`, prefer [`tas_rate_nr1`]: the general lower bound places
//! expectations differently and is least accurate with few receive
//! antennas.

use crate::error::{domain, Error, Result};
use crate::link_sim::SystemConfig;
use crate::specfun::{exp_scaled_e1, harmonic, ln_gamma, QuadratureSpec, EULER_MASCHERONI};
use crate::weibull_sum::{order_statistic_integral, WeibullSumFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    LowerBound,
    Approximation,
    UpperBound,
    Exact,
}

/// `∫ z G(z) dz`, `∫ G(z) dz` and `∫ G_q(z) dz` of the lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundIntegrals {
    pub z_g: f64,
    pub g: f64,
    pub g_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// bits/s/Hz
    pub value: f64,
    pub kind: BoundKind,
    pub integrals: Option<LowerBoundIntegrals>,
}

impl BoundResult {
    fn new(value: f64, kind: BoundKind) -> Self {
        Self {
            value: value.max(0.0),
            kind,
            integrals: None,
        }
    }
}

fn check_link(function: &'static str, snr: f64, alpha: f64) -> Result<()> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(domain(function, format!("snr = {snr} must be positive and finite")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(function, format!("alpha = {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// `log2(1 + ρα·g / (1 + ρ(1-α)·g))` for an effective channel gain `g`.
fn quantized_rate(snr: f64, alpha: f64, gain: f64) -> f64 {
    (snr * alpha * gain / (1.0 + snr * (1.0 - alpha) * gain)).ln_1p() / std::f64::consts::LN_2
}

pub fn tas_lower_bound(config: &SystemConfig, fit: &WeibullSumFit) -> Result<BoundResult> {
    tas_lower_bound_with(config, fit, QuadratureSpec::default())
}

/// `log2(1 + ρα ∫zG / ∫(G + ρ(1-α) G_q))` with
///
/// ```text
/// G(z)   = e^{-z} z^{N_r} P(N_r, z)^{N_t-1}
/// G_q(z) = 2Γ(N_r+1)/Γ(μ+1/k) · e^{-z} z^{μ+1/k-1} P(μ, z)^{N_t-1}
/// ```
///
/// Each integral is computed as a Gamma-normalized order-statistic weight
/// and rescaled, so nothing underflows for large `N_t`.
pub fn tas_lower_bound_with(config: &SystemConfig, fit: &WeibullSumFit, spec: QuadratureSpec) -> Result<BoundResult> {
    if fit.n_terms != config.n_r {
        return Err(Error::InvalidConfig(format!(
            "fit is for {} receive antennas, config has {}",
            fit.n_terms, config.n_r
        )));
    }
    let alpha = config.quant.alpha();
    check_link("tas_lower_bound", config.snr, alpha)?;
    let n_r = config.n_r as f64;
    let n_t = config.n_t;
    let s_q = fit.mu + 1.0 / fit.k;

    let w_zg = order_statistic_integral(n_r, n_r + 2.0, n_t, spec)?;
    let w_g = order_statistic_integral(n_r, n_r + 1.0, n_t, spec)?;
    let w_q = order_statistic_integral(fit.mu, s_q, n_t, spec)?;

    // Relative to Γ(N_r+1): ∫zG = (N_r+1)·w_zg, ∫G = w_g, ∫G_q = 2·w_q.
    let z_g = (n_r + 1.0) * w_zg;
    let g = w_g;
    let g_q = 2.0 * w_q;
    let value = (config.snr * alpha * z_g / (g + config.snr * (1.0 - alpha) * g_q)).ln_1p() / std::f64::consts::LN_2;

    let ln_scale = ln_gamma(n_r + 1.0)?;
    let scale = ln_scale.exp();
    let mut result = BoundResult::new(value, BoundKind::LowerBound);
    result.integrals = Some(LowerBoundIntegrals {
        z_g: z_g * scale,
        g: g * scale,
        g_q: g_q * scale,
    });
    Ok(result)
}

/// `log2(1 + ραH_{N_t} / (1 + ρ(1-α)H_{N_t}))`.
pub fn tas_rate_nr1(n_t: u64, snr: f64, alpha: f64) -> Result<BoundResult> {
    check_link("tas_rate_nr1", snr, alpha)?;
    let h = harmonic(n_t)?;
    Ok(BoundResult::new(
        quantized_rate(snr, alpha, h),
        BoundKind::Approximation,
    ))
}

/// [`tas_rate_nr1`] with `H_{N_t}` replaced by `ln N_t + γ_e`.
pub fn tas_rate_nr1_asymptotic(n_t: u64, snr: f64, alpha: f64) -> Result<BoundResult> {
    check_link("tas_rate_nr1_asymptotic", snr, alpha)?;
    if n_t < 2 {
        return Err(domain("tas_rate_nr1_asymptotic", "n_t must be at least 2"));
    }
    let gain = (n_t as f64).ln() + EULER_MASCHERONI;
    Ok(BoundResult::new(
        quantized_rate(snr, alpha, gain),
        BoundKind::Approximation,
    ))
}

/// `log2(1 + ρα / (1 + ρ(1-α)))`.
pub fn siso_upper_bound(snr: f64, alpha: f64) -> Result<BoundResult> {
    check_link("siso_upper_bound", snr, alpha)?;
    Ok(BoundResult::new(quantized_rate(snr, alpha, 1.0), BoundKind::UpperBound))
}

/// `(e^{1/ρ}E1(1/ρ) - e^{1/(ρβ)}E1(1/(ρβ))) / ln 2`, the exact ergodic rate
/// of one antenna on each side. The second term vanishes for `β = 0`.
pub fn siso_exact_rate(snr: f64, alpha: f64) -> Result<BoundResult> {
    check_link("siso_exact_rate", snr, alpha)?;
    let beta = 1.0 - alpha;
    let ideal = exp_scaled_e1(1.0 / snr)?;
    let distortion = if beta == 0.0 {
        0.0
    } else {
        exp_scaled_e1(1.0 / (snr * beta))?
    };
    Ok(BoundResult::new(
        (ideal - distortion) / std::f64::consts::LN_2,
        BoundKind::Exact,
    ))
}

/// `log2(1 + α/(1-α))`, the limit of the single-receive-antenna rate as
/// `N_t → ∞` (and of the SISO bound as `ρ → ∞`).
pub fn quantization_ceiling(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("quantization_ceiling", "alpha must lie in (0, 1)"));
    }
    Ok((alpha / (1.0 - alpha)).ln_1p() / std::f64::consts::LN_2)
}
