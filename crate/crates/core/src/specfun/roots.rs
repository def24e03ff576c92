use crate::error::{Error, Result};

/// Axis-aligned search region for `(k, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub k: (f64, f64),
    pub mu: (f64, f64),
}

impl SearchBox {
    fn contains(&self, k: f64, mu: f64) -> bool {
        k >= self.k.0 && k <= self.k.1 && mu >= self.mu.0 && mu <= self.mu.1
    }

    fn clamp(&self, k: f64, mu: f64) -> (f64, f64) {
        (k.clamp(self.k.0, self.k.1), mu.clamp(self.mu.0, self.mu.1))
    }
}

const TRACE_LEN: usize = 24;
const NEWTON_ITERS: usize = 100;
const MU_SCAN_POINTS: usize = 200;

struct Tracer<F> {
    residual: F,
    trace: Vec<(f64, f64, f64, f64)>,
}

impl<F: Fn(f64, f64) -> (f64, f64)> Tracer<F> {
    fn eval(&mut self, k: f64, mu: f64) -> (f64, f64) {
        let r = (self.residual)(k, mu);
        if self.trace.len() == TRACE_LEN {
            self.trace.remove(0);
        }
        self.trace.push((k, mu, r.0, r.1));
        r
    }
}

fn norm(r: (f64, f64)) -> f64 {
    let n = r.0.abs().max(r.1.abs());
    if n.is_nan() {
        f64::INFINITY
    } else {
        n
    }
}

/// Solves `residual(k, mu) = (0, 0)` inside `bounds`.
///
/// Damped Newton with a central-difference Jacobian runs first from
/// `initial`. If it stalls, leaves the box, or meets non-finite residuals,
/// the fallback treats the first residual as defining `k(mu)` (solved by
/// bisection in `k` at fixed `mu`), scans `mu` for a sign change of the
/// second residual along that curve and bisects it; Newton then polishes
/// the bracketed root. Success means `max |r_i| < tol`.
pub fn solve_moment_system<F>(residual: F, bounds: SearchBox, initial: (f64, f64), tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    if !(bounds.k.0 < bounds.k.1) || !(bounds.mu.0 < bounds.mu.1) || !(tol > 0.0) {
        return Err(Error::SearchFailure {
            reason: "degenerate search box or tolerance".into(),
            trace: Vec::new(),
        });
    }
    let mut tracer = Tracer {
        residual,
        trace: Vec::with_capacity(TRACE_LEN),
    };
    let start = bounds.clamp(initial.0, initial.1);
    if let Some(root) = newton(&mut tracer, bounds, start, tol) {
        return Ok(root);
    }
    if let Some(guess) = nested_bisection(&mut tracer, bounds) {
        if let Some(root) = newton(&mut tracer, bounds, guess, tol) {
            return Ok(root);
        }
        if norm(tracer.eval(guess.0, guess.1)) < tol {
            return Ok(guess);
        }
    }
    Err(Error::SearchFailure {
        reason: format!("no root with residual below {tol} found in {bounds:?}"),
        trace: tracer.trace,
    })
}

fn newton<F>(tracer: &mut Tracer<F>, bounds: SearchBox, start: (f64, f64), tol: f64) -> Option<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let (mut k, mut mu) = start;
    let mut r = tracer.eval(k, mu);
    let mut current = norm(r);
    for _ in 0..NEWTON_ITERS {
        if current < tol {
            return Some((k, mu));
        }
        if !current.is_finite() {
            return None;
        }
        let hk = 1e-6 * k.abs().max(1e-3);
        let hm = 1e-6 * mu.abs().max(1e-3);
        let rk_plus = tracer.eval(k + hk, mu);
        let rk_minus = tracer.eval(k - hk, mu);
        let rm_plus = tracer.eval(k, mu + hm);
        let rm_minus = tracer.eval(k, mu - hm);
        let j11 = (rk_plus.0 - rk_minus.0) / (2.0 * hk);
        let j21 = (rk_plus.1 - rk_minus.1) / (2.0 * hk);
        let j12 = (rm_plus.0 - rm_minus.0) / (2.0 * hm);
        let j22 = (rm_plus.1 - rm_minus.1) / (2.0 * hm);
        let det = j11 * j22 - j12 * j21;
        if !det.is_finite() || det == 0.0 {
            return None;
        }
        let dk = (j22 * r.0 - j12 * r.1) / det;
        let dmu = (j11 * r.1 - j21 * r.0) / det;

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (nk, nmu) = (k - step * dk, mu - step * dmu);
            if bounds.contains(nk, nmu) {
                let nr = tracer.eval(nk, nmu);
                let n = norm(nr);
                if n < current {
                    k = nk;
                    mu = nmu;
                    r = nr;
                    current = n;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return if current < tol { Some((k, mu)) } else { None };
        }
    }
    (current < tol).then_some((k, mu))
}

fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo.signum() == g_hi.signum() {
        if g_lo == 0.0 {
            return Some(lo);
        }
        if g_hi == 0.0 {
            return Some(hi);
        }
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Some(mid);
        }
        if !g_mid.is_finite() {
            return None;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn k_of_mu<F>(tracer: &mut Tracer<F>, bounds: &SearchBox, mu: f64) -> Option<f64>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    bisect(|k| tracer.eval(k, mu).0, bounds.k.0, bounds.k.1)
}

fn along_curve<F>(tracer: &mut Tracer<F>, bounds: &SearchBox, mu: f64) -> Option<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let k = k_of_mu(tracer, bounds, mu)?;
    let r2 = tracer.eval(k, mu).1;
    r2.is_finite().then_some((k, r2))
}

fn nested_bisection<F>(tracer: &mut Tracer<F>, bounds: SearchBox) -> Option<(f64, f64)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    // scan mu (log-spaced when the box allows) for a sign change of r2 along k(mu)
    let (mu_lo, mu_hi) = bounds.mu;
    let last = (MU_SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..MU_SCAN_POINTS)
        .map(|i| {
            let t = i as f64 / last;
            if mu_lo > 0.0 {
                mu_lo * ((mu_hi / mu_lo).ln() * t).exp()
            } else {
                mu_lo + (mu_hi - mu_lo) * t
            }
        })
        .collect();
    let mut previous: Option<(f64, f64)> = None;
    for &mu in &grid {
        let Some((_, r2)) = along_curve(tracer, &bounds, mu) else {
            previous = None;
            continue;
        };
        if let Some((prev_mu, prev_r2)) = previous {
            if prev_r2.signum() != r2.signum() {
                let mu_root = bisect(
                    |m| along_curve(tracer, &bounds, m).map_or(f64::NAN, |(_, r)| r),
                    prev_mu,
                    mu,
                )?;
                let k_root = k_of_mu(tracer, &bounds, mu_root)?;
                return Some((k_root, mu_root));
            }
        }
        previous = Some((mu, r2));
    }
    None
}
