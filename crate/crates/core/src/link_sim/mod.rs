//! Rayleigh channel draws, antenna-selection rules and the instantaneous
//! quantized rate of a single-antenna-selection link with MRC reception.

mod estimate;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::quantization::QuantizationModel;

pub use estimate::{estimate_ergodic_rate, estimate_ergodic_rate_with, estimate_ergodic_rates, MonteCarloEstimate};

/// Link parameters. The SNR is linear (`p_t / σ²`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub snr: f64,
    pub quant: QuantizationModel,
}

impl SystemConfig {
    pub fn new(n_t: usize, n_r: usize, snr: f64, quant: QuantizationModel) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::InvalidConfig(format!(
                "need at least one antenna on each side (n_t = {n_t}, n_r = {n_r})"
            )));
        }
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::InvalidConfig(format!("snr = {snr} must be positive and finite")));
        }
        Ok(Self { n_t, n_r, snr, quant })
    }
}

/// `n_r × n_t` complex channel, stored column-major so each transmit
/// antenna's vector is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_r: usize,
    n_t: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn from_columns(n_r: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        if n_r == 0 || columns.is_empty() || columns.iter().any(|c| c.len() != n_r) {
            return Err(domain("ChannelMatrix", "columns must be non-empty and of length n_r"));
        }
        Ok(Self {
            n_r,
            n_t: columns.len(),
            entries: columns.concat(),
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Channel vector of transmit antenna `i` (0-based).
    pub fn column(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.n_r..(i + 1) * self.n_r]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.n_r)
    }
}

/// I.i.d. CN(0, 1) entries: real and imaginary parts each N(0, 1/2).
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R, n_t: usize, n_r: usize) -> ChannelMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries = (0..n_t * n_r)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(scale * re, scale * im)
        })
        .collect();
    ChannelMatrix { n_r, n_t, entries }
}

/// `(‖h‖², Σ_j |h_j|⁴)` of one channel vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnGains {
    pub norm_sq: f64,
    pub quartic: f64,
}

impl ColumnGains {
    pub fn of(column: &[Complex64]) -> Result<Self> {
        let mut norm_sq = 0.0;
        let mut quartic = 0.0;
        for h in column {
            let p = h.norm_sqr();
            norm_sq += p;
            quartic += p * p;
        }
        if !norm_sq.is_finite() || !quartic.is_finite() {
            return Err(domain("instantaneous_rate", "non-finite channel entry"));
        }
        Ok(Self { norm_sq, quartic })
    }

    /// `log2(1 + ρα‖h‖⁴ / (‖h‖² + ρ(1-α)Σ|h_j|⁴))`; zero for an all-zero vector.
    pub fn rate(&self, snr: f64, alpha: f64) -> f64 {
        if self.norm_sq == 0.0 {
            return 0.0;
        }
        let signal = snr * alpha * self.norm_sq * self.norm_sq;
        let noise = self.norm_sq + snr * (1.0 - alpha) * self.quartic;
        (signal / noise).ln_1p() / std::f64::consts::LN_2
    }
}

/// Achievable rate (bits/s/Hz) of MRC on `column` under the AQNM.
pub fn instantaneous_rate(column: &[Complex64], snr: f64, alpha: f64) -> Result<f64> {
    Ok(ColumnGains::of(column)?.rate(snr, alpha))
}

/// How the transmit antenna is chosen per channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Maximize the quantized rate itself.
    ExactRateMax,
    /// Maximize `‖h_i‖`.
    NormMax,
    /// Maximize `Σ_j |h_{j,i}|⁴`.
    QuarticMax,
    /// Always antenna `i` (0-based).
    Fixed(usize),
}

impl SelectionRule {
    pub fn validate(&self, n_t: usize) -> Result<()> {
        match *self {
            SelectionRule::Fixed(i) if i >= n_t => Err(Error::InvalidConfig(format!(
                "fixed antenna {i} out of range for {n_t} transmit antennas"
            ))),
            _ => Ok(()),
        }
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        // strict comparison keeps the lowest index on ties
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

pub(crate) fn select_from_gains(gains: &[ColumnGains], snr: f64, alpha: f64, rule: SelectionRule) -> usize {
    match rule {
        SelectionRule::ExactRateMax => argmax(gains.iter().map(|g| g.rate(snr, alpha))),
        SelectionRule::NormMax => argmax(gains.iter().map(|g| g.norm_sq)),
        SelectionRule::QuarticMax => argmax(gains.iter().map(|g| g.quartic)),
        SelectionRule::Fixed(i) => i,
    }
}

/// Index (0-based) of the transmit antenna chosen by `rule`.
pub fn select_antenna(channel: &ChannelMatrix, snr: f64, alpha: f64, rule: SelectionRule) -> Result<usize> {
    rule.validate(channel.n_t())?;
    let gains = channel.columns().map(ColumnGains::of).collect::<Result<Vec<_>>>()?;
    Ok(select_from_gains(&gains, snr, alpha, rule))
}
