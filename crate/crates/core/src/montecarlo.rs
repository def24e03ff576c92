//! Seeded, partition-invariant Monte Carlo driver.
//!
//! Trial `t` of a run with seed `s` draws from ChaCha8 stream `t` keyed by
//! `s`, so its samples do not depend on which worker executes it. Trials
//! are grouped into fixed blocks of [`BLOCK_TRIALS`]; each block is
//! accumulated sequentially and block summaries are merged left to right.
//! The result is therefore bit-identical for any worker count, and
//! identical between the `parallel` and sequential builds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Trials per accumulation block. Part of the reproducibility contract:
/// changing it changes results in the last bits.
pub const BLOCK_TRIALS: u64 = 4096;

/// How blocks are distributed over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// One thread, in block order.
    Sequential,
    /// rayon's global pool (sequential without the `parallel` feature).
    #[default]
    Auto,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

/// Streaming mean/variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / n;
        self.mean += delta * weight;
        self.m2 += other.m2 + delta * delta * self.count as f64 * weight;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Per-trial generator factory.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    key: <ChaCha8Rng as SeedableRng>::Seed,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
        }
    }

    pub fn trial(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(trial);
        rng
    }
}

fn block_count(trials: u64) -> u64 {
    trials.div_ceil(BLOCK_TRIALS)
}

fn block_range(block: u64, trials: u64) -> std::ops::Range<u64> {
    let start = block * BLOCK_TRIALS;
    start..(start + BLOCK_TRIALS).min(trials)
}

#[cfg(feature = "parallel")]
fn map_blocks<T, G>(blocks: u64, parallelism: Parallelism, g: G) -> Vec<T>
where
    T: Send,
    G: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match parallelism {
        Parallelism::Sequential => (0..blocks).map(g).collect(),
        Parallelism::Auto => (0..blocks).into_par_iter().map(g).collect(),
        Parallelism::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| (0..blocks).into_par_iter().map(&g).collect()),
            // pool creation only fails on resource exhaustion; the result
            // does not depend on the thread count anyway
            Err(_) => (0..blocks).map(g).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn map_blocks<T, G>(blocks: u64, _parallelism: Parallelism, g: G) -> Vec<T>
where
    T: Send,
    G: Fn(u64) -> T + Sync + Send,
{
    (0..blocks).map(g).collect()
}

/// Runs `trials` trials of a `width`-valued experiment. `f(rng, t, out)`
/// writes trial `t`'s outputs into `out` (length `width`); each output gets
/// its own statistics.
pub fn run_trials_multi<F>(trials: u64, seed: u64, parallelism: Parallelism, width: usize, f: F) -> Vec<RunningStats>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [f64]) + Sync + Send,
{
    let streams = TrialStreams::new(seed);
    let blocks = map_blocks(block_count(trials), parallelism, |block| {
        let mut stats = vec![RunningStats::default(); width];
        let mut out = vec![0.0; width];
        for t in block_range(block, trials) {
            let mut rng = streams.trial(t);
            f(&mut rng, t, &mut out);
            for (s, &x) in stats.iter_mut().zip(&out) {
                s.push(x);
            }
        }
        stats
    });
    let mut total = vec![RunningStats::default(); width];
    for block in &blocks {
        for (acc, s) in total.iter_mut().zip(block) {
            acc.merge(s);
        }
    }
    total
}

/// Single-output form of [`run_trials_multi`].
pub fn run_trials<F>(trials: u64, seed: u64, parallelism: Parallelism, f: F) -> RunningStats
where
    F: Fn(&mut ChaCha8Rng, u64) -> f64 + Sync + Send,
{
    run_trials_multi(trials, seed, parallelism, 1, |rng, t, out| out[0] = f(rng, t))[0]
}

/// Collects one sample per trial, in trial order.
pub fn sample_trials<F>(trials: u64, seed: u64, parallelism: Parallelism, f: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng, u64) -> f64 + Sync + Send,
{
    let streams = TrialStreams::new(seed);
    let blocks = map_blocks(block_count(trials), parallelism, |block| {
        block_range(block, trials)
            .map(|t| f(&mut streams.trial(t), t))
            .collect::<Vec<_>>()
    });
    blocks.concat()
}
