//! Seeded, worker-count independent Monte Carlo plumbing.
//!
//! Samples are split into fixed batches of [`BATCH`] draws. Batch `b` always
//! uses the ChaCha8 stream `b` of the run seed, whichever worker executes it,
//! and per-batch results are returned in batch order so that reductions are
//! performed in a fixed sequence. Results therefore depend on `(seed, samples)`
//! only, never on the number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Draws per batch.
pub const BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Longest trace any estimator may request.
    pub t_max: f64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            workers: default_workers(),
            t_max: f64::INFINITY,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::Config(format!(
                "t_max = {} must be positive",
                self.t_max
            )));
        }
        Ok(())
    }

    /// Fails if a trace to time `t` would exceed the configured horizon.
    pub fn check_horizon(&self, t: f64) -> Result<()> {
        if t > self.t_max {
            return Err(Error::Config(format!(
                "requested time {t} exceeds the horizon t_max = {}",
                self.t_max
            )));
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// SplitMix64 mix of `seed` and `label`, used to give independent seeds to the
/// nodes of a multi-node run.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `f(rng, count)` once per batch and returns the results in batch order.
pub fn run_batches<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
{
    cfg.validate()?;
    let batches = cfg.samples.div_ceil(BATCH);
    let job = |b: u64| {
        let count = BATCH.min(cfg.samples - b * BATCH);
        f(&mut batch_rng(cfg.seed, b), count)
    };
    if cfg.workers == 1 {
        return (0..batches).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..batches).into_par_iter().map(job).collect())
}

/// Success count of a Bernoulli experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub successes: u64,
    pub trials: u64,
}

impl Tally {
    pub fn add(&mut self, other: Tally) {
        self.successes += other.successes;
        self.trials += other.trials;
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

impl std::iter::Sum for Tally {
    fn sum<I: Iterator<Item = Tally>>(iter: I) -> Self {
        let mut total = Tally::default();
        for t in iter {
            total.add(t);
        }
        total
    }
}
