use super::gamma::upper_continued_fraction;
use super::EULER_MASCHERONI;
use crate::error::{domain, Error, Result};

fn check(function: &'static str, z: f64) -> Result<()> {
    if z.is_nan() || z <= 0.0 {
        return Err(domain(function, format!("z = {z} must be positive")));
    }
    Ok(())
}

// E1(z) = -γ - ln z - Σ_{n≥1} (-z)^n / (n n!), used for z <= 1.
fn e1_series(z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..200 {
        let n = n as f64;
        term *= -z / n;
        let contrib = term / n;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            return Ok(-EULER_MASCHERONI - z.ln() - sum);
        }
    }
    Err(Error::Convergence {
        what: "E1 series",
        best_estimate: -EULER_MASCHERONI - z.ln() - sum,
        error_estimate: term.abs(),
    })
}

/// Exponential integral `E1(z) = Γ(0, z)` for `z > 0`.
pub fn expint_e1(z: f64) -> Result<f64> {
    check("expint_e1", z)?;
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    if z <= 1.0 {
        e1_series(z)
    } else {
        Ok((-z).exp() * upper_continued_fraction(0.0, z)?)
    }
}

/// `e^z E1(z)` for `z > 0`, finite for arbitrarily large `z` (it behaves
/// like `1/z` there).
pub fn exp_scaled_e1(z: f64) -> Result<f64> {
    check("exp_scaled_e1", z)?;
    if z == f64::INFINITY {
        return Ok(0.0);
    }
    if z <= 1.0 {
        Ok(z.exp() * e1_series(z)?)
    } else {
        upper_continued_fraction(0.0, z)
    }
}
