//! Additive quantization noise model (AQNM) parameters and a Lloyd-Max
//! designer for the unit Gaussian, which independently reproduces the
//! tabulated distortion factors.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::specfun::{std_normal_cdf, std_normal_sf, PI};

/// Normalized MSE of the optimal scalar quantizer of a unit Gaussian for
/// 1 to 5 bits (Max, 1960).
pub const AQNM_TABLE: [f64; 5] = [0.3634, 0.1175, 0.03454, 0.009497, 0.002499];

/// ADC resolution: a finite number of bits, or an ideal converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resolution {
    Bits(u32),
    Infinite,
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Bits(b) => write!(f, "{b}"),
            Resolution::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Resolution::Infinite);
        }
        let bits: u32 = s
            .parse()
            .map_err(|_| domain("Resolution", format!("`{s}` is neither a bit count nor `inf`")))?;
        if bits < 1 {
            return Err(domain("Resolution", "at least one bit is required"));
        }
        Ok(Resolution::Bits(bits))
    }
}

/// Distortion factor β(b): tabulated for b ≤ 5, `(π√3/2)·2^{-2b}` above,
/// zero for an ideal converter.
pub fn aqnm_beta(resolution: Resolution) -> Result<f64> {
    match resolution {
        Resolution::Infinite => Ok(0.0),
        Resolution::Bits(0) => Err(domain("aqnm_beta", "at least one bit is required")),
        Resolution::Bits(b @ 1..=5) => Ok(AQNM_TABLE[b as usize - 1]),
        Resolution::Bits(b) => Ok(PI * 3f64.sqrt() / 2.0 * 2f64.powi(-2 * b as i32)),
    }
}

/// AQNM linearization `y_q = α y + q` with `α = 1 - β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationModel {
    resolution: Resolution,
    beta: f64,
}

impl QuantizationModel {
    pub fn new(resolution: Resolution) -> Result<Self> {
        Ok(Self {
            resolution,
            beta: aqnm_beta(resolution)?,
        })
    }

    pub fn bits(bits: u32) -> Result<Self> {
        Self::new(Resolution::Bits(bits))
    }

    pub fn ideal() -> Self {
        Self {
            resolution: Resolution::Infinite,
            beta: 0.0,
        }
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.beta
    }
}

/// Diagonal entry of the quantization-noise covariance at one receive
/// antenna, normalized by the noise power: `α(1-α)(ρ|h_j|² + 1)`.
pub fn quantization_noise_power(model: &QuantizationModel, per_antenna_gain: f64, snr: f64) -> f64 {
    let alpha = model.alpha();
    alpha * (1.0 - alpha) * (snr * per_antenna_gain + 1.0)
}

/// Result of [`lloyd_max_design`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarQuantizer {
    /// Reconstruction levels, ascending, odd-symmetric.
    pub levels: Vec<f64>,
    /// Decision thresholds between consecutive levels.
    pub thresholds: Vec<f64>,
    /// Normalized mean squared error, i.e. β.
    pub mse: f64,
    pub iterations: usize,
}

fn std_normal_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }
}

/// Probability of `(lo, hi)` under N(0,1), evaluated on the tail that
/// avoids cancellation.
fn cell_mass(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        std_normal_sf(lo) - std_normal_sf(hi)
    } else {
        std_normal_cdf(hi) - std_normal_cdf(lo)
    }
}

struct Cell {
    mass: f64,
    first: f64,
    second: f64,
}

fn cell(lo: f64, hi: f64) -> Cell {
    let mass = cell_mass(lo, hi);
    let (plo, phi) = (std_normal_pdf(lo), std_normal_pdf(hi));
    let t_plo = if lo.is_infinite() { 0.0 } else { lo * plo };
    let t_phi = if hi.is_infinite() { 0.0 } else { hi * phi };
    Cell {
        mass,
        first: plo - phi,
        second: mass + t_plo - t_phi,
    }
}

fn edges(thresholds: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    let n = thresholds.len() + 1;
    (0..n).map(move |i| {
        let lo = if i == 0 { f64::NEG_INFINITY } else { thresholds[i - 1] };
        let hi = if i == n - 1 { f64::INFINITY } else { thresholds[i] };
        (lo, hi)
    })
}

fn midpoints(levels: &[f64]) -> Vec<f64> {
    levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Conditional means of the unit Gaussian over each cell.
pub fn cell_centroids(thresholds: &[f64]) -> Vec<f64> {
    edges(thresholds)
        .map(|(lo, hi)| {
            let c = cell(lo, hi);
            c.first / c.mass
        })
        .collect()
}

/// MSE of an arbitrary quantizer for the unit Gaussian.
pub fn gaussian_mse(levels: &[f64], thresholds: &[f64]) -> f64 {
    edges(thresholds)
        .zip(levels)
        .map(|((lo, hi), &y)| {
            let c = cell(lo, hi);
            c.second - 2.0 * y * c.first + y * y * c.mass
        })
        .sum()
}

/// Lloyd-Max design for the zero-mean unit-variance Gaussian.
///
/// Starts from uniform levels on [-3, 3] and alternates midpoint thresholds
/// with centroid levels until no level moves by more than `tol`.
pub fn lloyd_max_design(bits: u32, tol: f64, max_iter: usize) -> Result<ScalarQuantizer> {
    if !(1..=8).contains(&bits) {
        return Err(domain("lloyd_max_design", format!("bits = {bits} outside 1..=8")));
    }
    if !(tol > 0.0) {
        return Err(domain("lloyd_max_design", "tolerance must be positive"));
    }
    let n = 1usize << bits;
    let mut levels: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / n as f64).collect();
    let mut movement = f64::INFINITY;
    for iteration in 1..=max_iter {
        let thresholds = midpoints(&levels);
        let mut next = cell_centroids(&thresholds);
        for i in 0..n / 2 {
            let sym = 0.5 * (next[n - 1 - i] - next[i]);
            next[i] = -sym;
            next[n - 1 - i] = sym;
        }
        movement = levels.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        levels = next;
        if movement < tol {
            let thresholds = midpoints(&levels);
            let mse = gaussian_mse(&levels, &thresholds);
            return Ok(ScalarQuantizer {
                levels,
                thresholds,
                mse,
                iterations: iteration,
            });
        }
    }
    let thresholds = midpoints(&levels);
    Err(Error::Convergence {
        what: "lloyd_max_design",
        best_estimate: gaussian_mse(&levels, &thresholds),
        error_estimate: movement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_values() {
        assert_eq!(aqnm_beta(Resolution::Infinite).unwrap(), 0.0);
        assert_eq!(aqnm_beta(Resolution::Bits(3)).unwrap(), 0.03454);
        let b6 = aqnm_beta(Resolution::Bits(6)).unwrap();
        assert_relative_eq!(b6, PI * 3f64.sqrt() / 2.0 / 4096.0, max_relative = 1e-15);
        assert!((b6 - 6.642e-4).abs() < 1e-6);
        assert!(aqnm_beta(Resolution::Bits(0)).is_err());
    }

    #[test]
    fn beta_strictly_decreasing_and_asymptotic() {
        let betas: Vec<f64> = (1..=16).map(|b| aqnm_beta(Resolution::Bits(b)).unwrap()).collect();
        assert!(betas.windows(2).all(|w| w[1] < w[0]));
        assert!(betas[15] > 0.0);
        let scaled = betas[15] * 2f64.powi(32);
        assert_relative_eq!(scaled, PI * 3f64.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn model_invariants() {
        for r in [
            Resolution::Bits(1),
            Resolution::Bits(4),
            Resolution::Bits(9),
            Resolution::Infinite,
        ] {
            let m = QuantizationModel::new(r).unwrap();
            assert_eq!(m.alpha() + m.beta(), 1.0);
            assert!((0.0..1.0).contains(&m.beta()));
        }
        assert_eq!(QuantizationModel::ideal().alpha(), 1.0);
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("inf".parse::<Resolution>().unwrap(), Resolution::Infinite);
        assert_eq!(" 4 ".parse::<Resolution>().unwrap(), Resolution::Bits(4));
        assert!("0".parse::<Resolution>().is_err());
        assert!("three".parse::<Resolution>().is_err());
        assert_eq!(Resolution::Infinite.to_string(), "inf");
    }

    #[test]
    fn noise_power_examples() {
        assert_eq!(quantization_noise_power(&QuantizationModel::ideal(), 3.0, 10.0), 0.0);
        let b3 = QuantizationModel::bits(3).unwrap();
        assert!((quantization_noise_power(&b3, 1.0, 10.0) - 0.96546 * 0.03454 * 11.0).abs() < 1e-12);
        assert!((quantization_noise_power(&b3, 1.0, 10.0) - 0.36682).abs() < 1e-5);
        let b2 = QuantizationModel::bits(2).unwrap();
        assert!((quantization_noise_power(&b2, 5.0, 0.0) - 0.10369).abs() < 1e-5);
    }

    #[test]
    fn one_bit_closed_form() {
        let q = lloyd_max_design(1, 1e-13, 10_000).unwrap();
        let c = (2.0 / PI).sqrt();
        assert!((q.levels[1] - c).abs() < 1e-12);
        assert!((q.levels[0] + c).abs() < 1e-12);
        assert!((q.mse - (1.0 - 2.0 / PI)).abs() < 1e-12);
        assert_eq!(q.thresholds, vec![0.0]);
    }

    #[test]
    fn lloyd_conditions_hold_at_convergence() {
        for bits in 1..=6 {
            let q = lloyd_max_design(bits, 1e-12, 1_000_000).unwrap();
            assert_eq!(q.levels.len(), 1 << bits);
            assert_eq!(q.thresholds.len(), (1 << bits) - 1);
            for (i, t) in q.thresholds.iter().enumerate() {
                assert!((t - 0.5 * (q.levels[i] + q.levels[i + 1])).abs() <= 1e-9);
            }
            for (y, c) in q.levels.iter().zip(cell_centroids(&q.thresholds)) {
                assert!((y - c).abs() <= 1e-9, "bits {bits}: {y} vs {c}");
            }
            assert!(q.mse > 0.0 && q.mse < 1.0);
            assert!(q.levels.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn design_rejects_bad_arguments() {
        assert!(lloyd_max_design(0, 1e-9, 10).is_err());
        assert!(lloyd_max_design(9, 1e-9, 10).is_err());
        assert!(matches!(lloyd_max_design(5, 1e-15, 2), Err(Error::Convergence { .. })));
    }
}
