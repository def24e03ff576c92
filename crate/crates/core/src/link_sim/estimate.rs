use super::{draw_channel, select_from_gains, ColumnGains, SelectionRule, SystemConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{run_trials_multi, Parallelism, RunningStats};
use crate::quantization::QuantizationModel;

/// Sample mean of the selected-antenna rate over independent channel draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    /// bits/s/Hz
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    fn from_stats(stats: &RunningStats, seed: u64) -> Self {
        Self {
            mean: stats.mean(),
            std_error: stats.std_error(),
            trials: stats.count(),
            seed,
        }
    }
}

/// Ergodic rate under `rule`, parallelized over rayon's global pool.
pub fn estimate_ergodic_rate(
    config: &SystemConfig,
    rule: SelectionRule,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    estimate_ergodic_rate_with(config, rule, trials, seed, Parallelism::Auto)
}

pub fn estimate_ergodic_rate_with(
    config: &SystemConfig,
    rule: SelectionRule,
    trials: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<MonteCarloEstimate> {
    let mut out = estimate_ergodic_rates(
        config.n_t,
        config.n_r,
        config.snr,
        &[config.quant],
        rule,
        trials,
        seed,
        parallelism,
    )?;
    Ok(out.remove(0))
}

/// Estimates for several quantizers on common channel draws: trial `t`
/// sees the same channel for every model, so the estimates are coupled and
/// their differences have low variance.
#[allow(clippy::too_many_arguments)]
pub fn estimate_ergodic_rates(
    n_t: usize,
    n_r: usize,
    snr: f64,
    models: &[QuantizationModel],
    rule: SelectionRule,
    trials: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<MonteCarloEstimate>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    if models.is_empty() {
        return Err(Error::InvalidConfig("no quantization model given".into()));
    }
    for m in models {
        SystemConfig::new(n_t, n_r, snr, *m)?;
    }
    rule.validate(n_t)?;
    let alphas: Vec<f64> = models.iter().map(QuantizationModel::alpha).collect();
    let stats = run_trials_multi(trials, seed, parallelism, alphas.len(), |rng, _t, out| {
        let h = draw_channel(rng, n_t, n_r);
        let gains: Vec<ColumnGains> = h
            .columns()
            .map(|c| {
                ColumnGains::of(c).unwrap_or(ColumnGains {
                    norm_sq: f64::NAN,
                    quartic: f64::NAN,
                })
            })
            .collect();
        for (slot, &alpha) in out.iter_mut().zip(&alphas) {
            let i = select_from_gains(&gains, snr, alpha, rule);
            *slot = gains[i].rate(snr, alpha);
        }
    });
    let estimates: Vec<MonteCarloEstimate> = stats.iter().map(|s| MonteCarloEstimate::from_stats(s, seed)).collect();
    if estimates.iter().any(|e| !e.mean.is_finite()) {
        return Err(Error::Range("Monte Carlo mean is not finite".into()));
    }
    Ok(estimates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_sim::instantaneous_rate;
    use crate::montecarlo::TrialStreams;

    fn config(n_t: usize, n_r: usize, snr: f64, bits: u32) -> SystemConfig {
        SystemConfig::new(n_t, n_r, snr, QuantizationModel::bits(bits).unwrap()).unwrap()
    }

    #[test]
    fn single_trial_is_the_first_draw() {
        let cfg = config(3, 2, 10.0, 2);
        let est = estimate_ergodic_rate(&cfg, SelectionRule::Fixed(1), 1, 77).unwrap();
        let h = draw_channel(&mut TrialStreams::new(77).trial(0), 3, 2);
        assert_eq!(
            est.mean,
            instantaneous_rate(h.column(1), 10.0, cfg.quant.alpha()).unwrap()
        );
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.trials, 1);
        assert_eq!(est.seed, 77);
    }

    #[test]
    fn rejects_zero_trials_and_bad_rule() {
        let cfg = config(2, 2, 1.0, 3);
        assert!(estimate_ergodic_rate(&cfg, SelectionRule::ExactRateMax, 0, 1).is_err());
        assert!(estimate_ergodic_rate(&cfg, SelectionRule::Fixed(2), 10, 1).is_err());
    }

    #[test]
    fn batch_equals_individual_runs() {
        let models = [QuantizationModel::bits(1).unwrap(), QuantizationModel::ideal()];
        let batch = estimate_ergodic_rates(
            4,
            2,
            5.0,
            &models,
            SelectionRule::ExactRateMax,
            5000,
            9,
            Parallelism::Auto,
        )
        .unwrap();
        for (m, b) in models.iter().zip(&batch) {
            let cfg = SystemConfig::new(4, 2, 5.0, *m).unwrap();
            let single = estimate_ergodic_rate(&cfg, SelectionRule::ExactRateMax, 5000, 9).unwrap();
            assert_eq!(single, *b);
        }
    }

    #[test]
    fn partition_invariance() {
        let cfg = config(8, 4, 3.0, 3);
        let reference =
            estimate_ergodic_rate_with(&cfg, SelectionRule::ExactRateMax, 20_000, 5, Parallelism::Sequential).unwrap();
        for p in [Parallelism::Threads(2), Parallelism::Threads(5), Parallelism::Auto] {
            let e = estimate_ergodic_rate_with(&cfg, SelectionRule::ExactRateMax, 20_000, 5, p).unwrap();
            assert_eq!(e.mean.to_bits(), reference.mean.to_bits());
            assert_eq!(e.std_error.to_bits(), reference.std_error.to_bits());
        }
    }
}
