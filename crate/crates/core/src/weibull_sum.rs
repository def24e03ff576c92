//! Moment-matched generalized-Gamma approximation of a sum of i.i.d.
//! Weibull variables, and the order statistics built on it.
//!
//! Under Rayleigh fading `|h_{j,i}|²` is unit exponential, so `|h_{j,i}|⁴`
//! is Weibull with scale `Ω = 1` and shape `k = 1/2`, and the quantization
//! term of the rate is driven by `X_i = Σ_j |h_{j,i}|⁴`. The fitted density
//! is
//!
//! ```text
//! f(x) = k μ^μ x^{kμ-1} exp(-μ x^k / Ω) / (Ω^μ Γ(μ)),
//! F(x) = P(μ, μ x^k / Ω)
//! ```
//!
//! with `(k, μ)` matched to the first, second and fourth moments of `X`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::montecarlo::{sample_trials, Parallelism};
use crate::specfun::{
    integrate_semi_infinite, ln_gamma, ln_reg_lower_gamma, reg_lower_gamma, solve_moment_system, QuadratureSpec,
    SearchBox,
};

/// Single Weibull term with density `(k/Ω) w^{k-1} exp(-w^k/Ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullComponent {
    scale: f64,
    shape: f64,
}

impl Default for WeibullComponent {
    /// `|h|⁴` for a unit-variance complex Gaussian `h`.
    fn default() -> Self {
        Self { scale: 1.0, shape: 0.5 }
    }
}

impl WeibullComponent {
    pub fn new(scale: f64, shape: f64) -> Result<Self> {
        if !(scale > 0.0 && shape > 0.0) || !scale.is_finite() || !shape.is_finite() {
            return Err(domain("WeibullComponent", "scale and shape must be positive"));
        }
        Ok(Self { scale, shape })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

/// `E[W^n] = Ω^{n/k} Γ(1 + n/k)`.
pub fn component_moment(c: &WeibullComponent, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let r = n as f64 / c.shape;
    if r.fract() == 0.0 && r <= 170.0 {
        // exact factorial for integer exponents (the default component)
        let factorial: f64 = (1..=r as u32).map(f64::from).product();
        return c.scale.powf(r) * factorial;
    }
    (r * c.scale.ln() + crate::specfun::ln_gamma(1.0 + r).unwrap_or(f64::INFINITY)).exp()
}

const MAX_SUM_ORDER: u32 = 20;

/// Exact `E[X^order]` for `X` the sum of `n_terms` default components.
///
/// Binomial convolution over the terms: `M_m(n) = Σ_j C(n, j) M_{m-1}(j)
/// E[W^{n-j}]`.
pub fn sum_moment(n_terms: usize, order: u32) -> Result<f64> {
    Ok(sum_moments(n_terms, order)?[order as usize])
}

/// `E[X^0], ..., E[X^max_order]`.
pub fn sum_moments(n_terms: usize, max_order: u32) -> Result<Vec<f64>> {
    if n_terms == 0 {
        return Err(domain("sum_moment", "at least one term is required"));
    }
    if max_order > MAX_SUM_ORDER {
        return Err(Error::Range(format!(
            "moment order {max_order} exceeds {MAX_SUM_ORDER}"
        )));
    }
    let len = max_order as usize + 1;
    let component = WeibullComponent::default();
    let w: Vec<f64> = (0..len as u32).map(|n| component_moment(&component, n)).collect();
    let binom = pascal(len);
    let mut current = w.clone();
    for _ in 1..n_terms {
        current = (0..len)
            .map(|n| (0..=n).map(|j| binom[n][j] * current[j] * w[n - j]).sum())
            .collect();
    }
    Ok(current)
}

fn pascal(len: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(len);
    for n in 0..len {
        let mut row = vec![1.0; n + 1];
        for j in 1..n {
            row[j] = rows[n - 1][j - 1] + rows[n - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Options for [`fit_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Bound on `|LHS/RHS - 1|` for both moment equations.
    pub tolerance: f64,
    /// `None` selects [`default_search_box`].
    pub search: Option<SearchBox>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            search: None,
        }
    }
}

/// `k ∈ [0.01, 2]`, `μ ∈ [0.25, 8N_r + N_r²]`. The fitted `μ` grows
/// faster than linearly in `N_r` (about 1800 at `N_r = 64`).
pub fn default_search_box(n_terms: usize) -> SearchBox {
    let n = n_terms as f64;
    SearchBox {
        k: (0.01, 2.0),
        mu: (0.25, 8.0 * n + n * n),
    }
}

/// Fitted `(k, μ, Ω)` for a sum of `n_terms` default components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullSumFit {
    pub n_terms: usize,
    pub k: f64,
    pub mu: f64,
    pub omega: f64,
    /// Normalized residuals of the two moment equations at `(k, μ)`.
    pub residuals: (f64, f64),
}

impl WeibullSumFit {
    pub fn residual_norm(&self) -> f64 {
        self.residuals.0.abs().max(self.residuals.1.abs())
    }

    /// `E[X] = 2 N_r`.
    pub fn mean(&self) -> f64 {
        2.0 * self.n_terms as f64
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        approx_pdf(self, x)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        approx_cdf(self, x)
    }
}

/// Raw moments `E[X], E[X²], E[X⁴]` used by the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitMoments {
    pub first: f64,
    pub second: f64,
    pub fourth: f64,
}

impl FitMoments {
    pub fn of_sum(n_terms: usize) -> Result<Self> {
        let m = sum_moments(n_terms, 4)?;
        Ok(Self {
            first: m[1],
            second: m[2],
            fourth: m[4],
        })
    }
}

/// `(Γ²(μ+1/k)E[X²] / (Γ(μ)Γ(μ+2/k)E²[X]) - 1, Γ²(μ+2/k)E[X⁴] / (Γ(μ)Γ(μ+4/k)E²[X²]) - 1)`,
/// evaluated in log space.
pub fn moment_residuals(k: f64, mu: f64, moments: &FitMoments) -> (f64, f64) {
    if !(k > 0.0 && mu > 0.0) {
        return (f64::NAN, f64::NAN);
    }
    let lg = |x: f64| crate::specfun::ln_gamma(x).unwrap_or(f64::NAN);
    let lg_mu = lg(mu);
    let lg1 = lg(mu + 1.0 / k);
    let lg2 = lg(mu + 2.0 / k);
    let lg4 = lg(mu + 4.0 / k);
    let r1 = 2.0 * lg1 + moments.second.ln() - lg_mu - lg2 - 2.0 * moments.first.ln();
    let r2 = 2.0 * lg2 + moments.fourth.ln() - lg_mu - lg4 - 2.0 * moments.second.ln();
    (r1.exp_m1(), r2.exp_m1())
}

pub fn fit(n_terms: usize) -> Result<WeibullSumFit> {
    fit_with(n_terms, FitOptions::default())
}

pub fn fit_with(n_terms: usize, options: FitOptions) -> Result<WeibullSumFit> {
    if n_terms == 0 {
        return Err(domain("fit", "at least one term is required"));
    }
    let moments = FitMoments::of_sum(n_terms)?;
    let search = options.search.unwrap_or_else(|| default_search_box(n_terms));
    let (k, mu) = solve_moment_system(
        |k, mu| moment_residuals(k, mu, &moments),
        search,
        (0.5, n_terms as f64),
        options.tolerance,
    )?;
    // Ω^{1/k} = μ^{1/k} Γ(μ) E[X] / Γ(μ + 1/k)
    let ln_omega = mu.ln() + k * (ln_gamma(mu)? + moments.first.ln() - ln_gamma(mu + 1.0 / k)?);
    Ok(WeibullSumFit {
        n_terms,
        k,
        mu,
        omega: ln_omega.exp(),
        residuals: moment_residuals(k, mu, &moments),
    })
}

fn check_x(function: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(domain(function, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

pub fn approx_pdf(fit: &WeibullSumFit, x: f64) -> Result<f64> {
    check_x("approx_pdf", x)?;
    let WeibullSumFit { k, mu, omega, .. } = *fit;
    let power = k * mu - 1.0;
    if x == 0.0 {
        return Ok(if power > 0.0 {
            0.0
        } else if power == 0.0 {
            (k.ln() + mu * mu.ln() - mu * omega.ln() - ln_gamma(mu)?).exp()
        } else {
            f64::INFINITY
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let ln_pdf = k.ln() + mu * mu.ln() + power * x.ln() - mu * x.powf(k) / omega - mu * omega.ln() - ln_gamma(mu)?;
    Ok(ln_pdf.exp())
}

/// `1 - Γ(μ, μx^k/Ω)/Γ(μ)`.
pub fn approx_cdf(fit: &WeibullSumFit, x: f64) -> Result<f64> {
    check_x("approx_cdf", x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    reg_lower_gamma(fit.mu, fit.mu * x.powf(fit.k) / fit.omega)
}

/// `∫_0^∞ P(a, y)^{n-1} · y^{s-1} e^{-y} / Γ(s) dy`: the order-statistic
/// weight of the maximum of `n` Gamma(a)-like variables against a Gamma(s)
/// density. Evaluated in log space so the `(n-1)`-th power cannot
/// underflow the whole integrand.
pub fn order_statistic_integral(a: f64, s: f64, n: usize, spec: QuadratureSpec) -> Result<f64> {
    if n == 0 {
        return Err(domain("order_statistic_integral", "n must be at least 1"));
    }
    if !(a > 0.0 && s > 0.0) {
        return Err(domain("order_statistic_integral", "shapes must be positive"));
    }
    let ln_norm = ln_gamma(s)?;
    let power = (n - 1) as f64;
    integrate_semi_infinite(
        |y| {
            let mut ln_f = (s - 1.0) * y.ln() - y - ln_norm;
            if n > 1 {
                ln_f += power * ln_reg_lower_gamma(a, y).unwrap_or(f64::NAN);
            }
            ln_f.exp()
        },
        spec,
    )
}

/// `E[max_i X_i]` over `n_select` i.i.d. sums under the fitted law:
/// `(N_t/Γ(μ)) (Ω/μ)^{1/k} ∫ P(μ,y)^{N_t-1} y^{μ+1/k-1} e^{-y} dy`.
pub fn max_mean(fit: &WeibullSumFit, n_select: usize) -> Result<f64> {
    max_mean_with(fit, n_select, QuadratureSpec::default())
}

pub fn max_mean_with(fit: &WeibullSumFit, n_select: usize, spec: QuadratureSpec) -> Result<f64> {
    if n_select == 0 {
        return Err(domain("max_mean", "n_select must be at least 1"));
    }
    let WeibullSumFit { k, mu, omega, .. } = *fit;
    let s = mu + 1.0 / k;
    let integral = order_statistic_integral(mu, s, n_select, spec)?;
    let ln_scale = (n_select as f64).ln() - ln_gamma(mu)? + (omega.ln() - mu.ln()) / k + ln_gamma(s)?;
    Ok(ln_scale.exp() * integral)
}

/// One draw of `Σ_{j=1}^{n_terms} |h_j|⁴` with `h_j ~ CN(0, 1)`.
pub fn draw_sum<R: Rng + ?Sized>(rng: &mut R, n_terms: usize) -> f64 {
    (0..n_terms)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let p = 0.5 * (re * re + im * im);
            p * p
        })
        .sum()
}

/// `count` seeded draws of the sum, in trial order.
pub fn sample_sums(n_terms: usize, count: u64, seed: u64, parallelism: Parallelism) -> Vec<f64> {
    sample_trials(count, seed, parallelism, |rng, _| draw_sum(rng, n_terms))
}

/// Kolmogorov–Smirnov distance `sup |F_n(x) - F(x)|` of a sample against
/// `cdf`. Sorts `sample` in place.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn component_moments() {
        let c = WeibullComponent::default();
        assert_eq!(component_moment(&c, 0), 1.0);
        assert_relative_eq!(component_moment(&c, 1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(component_moment(&c, 4), 40320.0, max_relative = 1e-13);
        let other = WeibullComponent::new(2.0, 1.0).unwrap();
        // exponential with mean 2: E[W^2] = 2·2²
        assert_relative_eq!(component_moment(&other, 2), 8.0, max_relative = 1e-14);
        assert!(WeibullComponent::new(0.0, 1.0).is_err());
    }

    // nested multinomial sum written out directly for two and three terms
    fn brute_moment(n_terms: usize, order: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|i| i as f64).product::<f64>();
        let w = |n: u32| fact(2 * n);
        match n_terms {
            1 => w(order),
            2 => (0..=order)
                .map(|j| fact(order) / (fact(j) * fact(order - j)) * w(j) * w(order - j))
                .sum(),
            3 => {
                let mut s = 0.0;
                for a in 0..=order {
                    for b in 0..=order - a {
                        let c = order - a - b;
                        s += fact(order) / (fact(a) * fact(b) * fact(c)) * w(a) * w(b) * w(c);
                    }
                }
                s
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn sum_moment_examples() {
        assert_relative_eq!(sum_moment(1, 2).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(sum_moment(2, 2).unwrap(), 56.0, max_relative = 1e-14);
        assert_relative_eq!(sum_moment(2, 4).unwrap(), 95616.0, max_relative = 1e-13);
        for n in 1..=3 {
            for order in 1..=6 {
                assert_relative_eq!(
                    sum_moment(n, order).unwrap(),
                    brute_moment(n, order),
                    max_relative = 1e-12
                );
            }
        }
        for n in 1..=64 {
            assert_eq!(sum_moment(n, 1).unwrap(), 2.0 * n as f64);
        }
        assert!(matches!(sum_moment(2, 21), Err(Error::Range(_))));
        assert!(sum_moment(0, 2).is_err());
    }

    #[test]
    fn single_term_fit_is_exact() {
        let f = fit(1).unwrap();
        assert!((f.k - 0.5).abs() < 1e-8);
        assert!((f.mu - 1.0).abs() < 1e-8);
        assert!((f.omega - 1.0).abs() < 1e-8);
        for i in 0..=200 {
            let x = 0.5 * i as f64;
            let exact = 1.0 - (-x.sqrt()).exp();
            assert!((f.cdf(x).unwrap() - exact).abs() < 1e-10, "x = {x}");
        }
        let x4 = f.cdf(4.0).unwrap();
        assert!((x4 - 0.864_664_7).abs() < 1e-7);
    }

    #[test]
    fn fits_satisfy_moment_equations() {
        for n in [1, 2, 3, 4, 8, 16] {
            let f = fit(n).unwrap();
            assert!(f.residual_norm() < 1e-8, "n = {n}: {:?}", f.residuals);
            let m = FitMoments::of_sum(n).unwrap();
            let (r1, r2) = moment_residuals(f.k, f.mu, &m);
            assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8);
            // Ω closed form
            let lhs = f.omega.powf(1.0 / f.k);
            let rhs = f.mu.powf(1.0 / f.k) * ln_gamma(f.mu).unwrap().exp() * m.first
                / ln_gamma(f.mu + 1.0 / f.k).unwrap().exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }

    #[test]
    fn fit_rejects_zero_terms() {
        assert!(fit(0).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        for n in [1, 2, 8] {
            let f = fit(n).unwrap();
            let spec = QuadratureSpec {
                max_subdivisions: 5000,
                ..QuadratureSpec::default()
            };
            let total = integrate_semi_infinite(|x| f.pdf(x).unwrap(), spec).unwrap();
            assert!((total - 1.0).abs() < 1e-8, "n = {n}: {total}");
        }
    }

    #[test]
    fn cdf_edge_cases() {
        let f = fit(4).unwrap();
        assert_eq!(f.cdf(0.0).unwrap(), 0.0);
        assert_eq!(f.cdf(f64::INFINITY).unwrap(), 1.0);
        assert!(f.cdf(-1.0).is_err());
        assert!(f.pdf(-1.0).is_err());
        assert!(f.cdf(1e6).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn max_mean_single_antenna_recovers_mean() {
        for n in [1, 2, 4, 8] {
            let f = fit(n).unwrap();
            assert_relative_eq!(max_mean(&f, 1).unwrap(), 2.0 * n as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn max_mean_of_two_single_terms() {
        // E[max(E1², E2²)] = 2·E[W] - E[min²] = 4 - 1/2
        let f = fit(1).unwrap();
        assert_relative_eq!(max_mean(&f, 2).unwrap(), 3.5, max_relative = 1e-9);
    }

    #[test]
    fn max_mean_nondecreasing() {
        let f = fit(3).unwrap();
        let values: Vec<f64> = [1, 2, 3, 5, 8, 13, 32, 64]
            .iter()
            .map(|&n| max_mean(&f, n).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
    }

    #[test]
    fn ks_of_exact_law_is_small() {
        let mut sample = sample_sums(1, 200_000, 3, Parallelism::Auto);
        let d = ks_distance(&mut sample, |x| 1.0 - (-x.sqrt()).exp());
        // 1.63/sqrt(n) is the 1% critical value
        assert!(d < 1.63 / (200_000f64).sqrt(), "{d}");
    }

    #[test]
    fn ks_distance_detects_wrong_law() {
        let mut sample = sample_sums(2, 50_000, 4, Parallelism::Auto);
        let wrong = fit(1).unwrap();
        assert!(ks_distance(&mut sample, |x| wrong.cdf(x).unwrap()) > 0.1);
    }
}
