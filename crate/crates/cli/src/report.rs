//! Text reports for the `fit` and `quantizer` subcommands.

use std::fmt::Write;

use tasrate::montecarlo::Parallelism;
use tasrate::quantization::{aqnm_beta, lloyd_max_design, Resolution};
use tasrate::weibull_sum::{approx_cdf, fit_with, ks_distance, sample_sums, FitOptions};

pub fn fit_report(n_r: usize, samples: u64, seed: u64, tol: f64) -> tasrate::Result<String> {
    let fit = fit_with(
        n_r,
        FitOptions {
            tolerance: tol,
            search: None,
        },
    )?;
    let mut out = String::new();
    let _ = writeln!(out, "n_r = {n_r}");
    let _ = writeln!(out, "k = {:.12}", fit.k);
    let _ = writeln!(out, "mu = {:.12}", fit.mu);
    let _ = writeln!(out, "omega = {:.12}", fit.omega);
    let _ = writeln!(out, "residuals = {:.3e}, {:.3e}", fit.residuals.0, fit.residuals.1);
    if samples > 0 {
        let mut sample = sample_sums(n_r, samples, seed, Parallelism::Auto);
        let ks = ks_distance(&mut sample, |x| approx_cdf(&fit, x).unwrap_or(f64::NAN));
        let _ = writeln!(out, "ks_distance = {ks:.6} ({samples} samples, seed {seed})");
    }
    Ok(out)
}

pub fn quantizer_report(bits: &[u32], tol: f64) -> tasrate::Result<String> {
    let mut out = String::from("bits,beta_lloyd_max,beta_aqnm,alpha,iterations,levels\n");
    for &b in bits {
        let q = lloyd_max_design(b, tol, 1_000_000)?;
        let table = aqnm_beta(Resolution::Bits(b))?;
        let levels: Vec<String> = q.levels.iter().map(|l| format!("{l:.6}")).collect();
        let _ = writeln!(
            out,
            "{b},{:.8},{table},{:.8},{},{}",
            q.mse,
            1.0 - table,
            q.iterations,
            levels.join(" ")
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_antenna_report() {
        let text = fit_report(1, 1000, 1, 1e-10).unwrap();
        assert!(text.contains("k = 0.500000000000"));
        assert!(text.contains("mu = 1.000000000000"));
        assert!(text.contains("ks_distance"));
    }

    #[test]
    fn quantizer_rows() {
        let text = quantizer_report(&[1, 2], 1e-10).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("1,0.36338"));
    }
}
