use super::expint::expint_e1;
use crate::error::{domain, Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

// Lanczos, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_8;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain("ln_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x >= 10.0 {
        return stirling(x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2n} / (2n (2n-1) x^{2n-1})
    let tail = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + tail
}

enum Branch {
    /// `sum` of the lower series; `P = exp(ln_prefix) * sum`.
    Series { ln_prefix: f64, sum: f64 },
    /// continued fraction for `Q = exp(ln_prefix) * cf`.
    ContinuedFraction { ln_prefix: f64, cf: f64 },
}

fn check_args(function: &'static str, a: f64, z: f64) -> Result<()> {
    if !a.is_finite() || !z.is_finite() || a.is_nan() || z.is_nan() {
        return Err(domain(function, format!("non-finite argument (a = {a}, z = {z})")));
    }
    if a < 0.0 || z < 0.0 {
        return Err(domain(function, format!("negative argument (a = {a}, z = {z})")));
    }
    Ok(())
}

/// Requires `a > 0`, `z > 0`.
fn incomplete_gamma_branch(a: f64, z: f64) -> Result<Branch> {
    if z < a + 1.0 {
        let ln_prefix = a * z.ln() - z - ln_gamma_unchecked(a + 1.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut denom = a;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= z / denom;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                return Ok(Branch::Series { ln_prefix, sum });
            }
        }
        Err(Error::Convergence {
            what: "incomplete gamma series",
            best_estimate: (ln_prefix.exp() * sum),
            error_estimate: term,
        })
    } else {
        let ln_prefix = a * z.ln() - z - ln_gamma_unchecked(a);
        let cf = upper_continued_fraction(a, z)?;
        Ok(Branch::ContinuedFraction { ln_prefix, cf })
    }
}

/// Modified Lentz evaluation of `e^z z^{-a} Γ(a, z)`; valid for `a >= 0`
/// and `z` not small compared to `a`.
pub(crate) fn upper_continued_fraction(a: f64, z: f64) -> Result<f64> {
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        what: "incomplete gamma continued fraction",
        best_estimate: h,
        error_estimate: f64::NAN,
    })
}

/// `Q(a, z) = Γ(a, z) / Γ(a)`. For `a = 0` the unregularized `Γ(0, z) = E1(z)`
/// is returned instead, since `Γ(0)` is infinite.
pub fn reg_upper_gamma(a: f64, z: f64) -> Result<f64> {
    check_args("reg_upper_gamma", a, z)?;
    if a == 0.0 {
        if z == 0.0 {
            return Err(Error::Divergence {
                function: "reg_upper_gamma",
            });
        }
        return expint_e1(z);
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    Ok(match incomplete_gamma_branch(a, z)? {
        Branch::Series { ln_prefix, sum } => 1.0 - ln_prefix.exp() * sum,
        Branch::ContinuedFraction { ln_prefix, cf } => ln_prefix.exp() * cf,
    })
}

/// `P(a, z) = γ(a, z) / Γ(a)` for `a > 0`.
pub fn reg_lower_gamma(a: f64, z: f64) -> Result<f64> {
    check_args("reg_lower_gamma", a, z)?;
    if a == 0.0 {
        return Err(domain("reg_lower_gamma", "a must be positive"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(match incomplete_gamma_branch(a, z)? {
        Branch::Series { ln_prefix, sum } => ln_prefix.exp() * sum,
        Branch::ContinuedFraction { ln_prefix, cf } => 1.0 - ln_prefix.exp() * cf,
    })
}

/// `ln P(a, z)`, accurate where `P` itself would underflow. Returns
/// `-inf` at `z = 0`.
pub fn ln_reg_lower_gamma(a: f64, z: f64) -> Result<f64> {
    check_args("ln_reg_lower_gamma", a, z)?;
    if a == 0.0 {
        return Err(domain("ln_reg_lower_gamma", "a must be positive"));
    }
    if z == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(match incomplete_gamma_branch(a, z)? {
        Branch::Series { ln_prefix, sum } => ln_prefix + sum.ln(),
        Branch::ContinuedFraction { ln_prefix, cf } => (-(ln_prefix.exp() * cf)).ln_1p(),
    })
}

/// Standard normal CDF via `erfc(x) = Q(1/2, x^2)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    let half_tail = 0.5 * reg_upper_gamma(0.5, 0.5 * x * x).unwrap_or(0.0);
    if x < 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

/// Standard normal survival function `1 - Φ(x)`, without cancellation for
/// large positive `x`.
pub fn std_normal_sf(x: f64) -> f64 {
    std_normal_cdf(-x)
}

/// `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(domain("harmonic", "n must be at least 1"));
    }
    if n < 1000 {
        // smallest terms first
        return Ok((1..=n).rev().map(|k| 1.0 / k as f64).sum());
    }
    // Euler–Maclaurin; truncation error below 1/(252 n^6).
    let x = n as f64;
    let inv2 = 1.0 / (x * x);
    Ok(x.ln() + super::EULER_MASCHERONI + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0)
}
