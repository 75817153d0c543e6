//! Monte Carlo estimate of `W_n^Y(x) = E[S_{G-1}^n]` with `G` geometric on
//! `{1, 2, ...}` with success probability `1/(1 + x)`.
//!
//! Samples are split into fixed-size chunks. Chunk `c` draws from the ChaCha8
//! stream `c` of the seed, and chunk statistics are merged in chunk order, so
//! the estimate is bit-identical for a fixed `(seed, samples, chunk_size)`
//! whether chunks run sequentially or in parallel.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;

use crate::error::{domain, usage, Result};
use crate::exactnum::{to_f64, Rational};
use crate::moments::DistSpec;
use crate::par::Execution;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// `(value - exact) / stderr`; zero when both the error and the standard
    /// error vanish.
    pub fn zscore(&self, exact: f64) -> f64 {
        let diff = self.value - exact;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
    pub execution: Execution,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
            execution: Execution::default(),
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }
}

/// Estimates `W_n^Y(x0)` with the default chunking and execution policy.
pub fn mc_fubini(
    dist: &DistSpec,
    n: usize,
    x0: &Rational,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    mc_fubini_with(dist, n, x0, McConfig::new(samples, seed))
}

pub fn mc_fubini_with(dist: &DistSpec, n: usize, x0: &Rational, cfg: McConfig) -> Result<Estimate> {
    if cfg.samples == 0 {
        return usage("Monte Carlo needs at least one sample");
    }
    if cfg.chunk_size == 0 {
        return usage("chunk size must be positive");
    }
    let x = to_f64(x0);
    if x.is_nan() || x < 0.0 || !x.is_finite() {
        return domain(format!("the geometric mixture needs x >= 0, got {x0}"));
    }
    let stop = Geometric::new(1.0 / (1.0 + x)).map_err(|e| crate::Error::Domain(e.to_string()))?;
    let sampler = dist.sampler();
    let power = i32::try_from(n).map_err(|_| crate::Error::Usage("n too large".into()))?;

    let chunks = cfg.samples.div_ceil(cfg.chunk_size);
    let per_chunk = cfg.execution.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c);
        let draws = cfg.chunk_size.min(cfg.samples - c * cfg.chunk_size);
        let mut acc = Moments::default();
        for _ in 0..draws {
            // failures before the first success = G - 1
            let terms = stop.sample(&mut rng);
            let mut s = 0.0;
            for _ in 0..terms {
                s += sampler.sample(&mut rng);
            }
            acc.push(s.powi(power));
        }
        acc
    });
    let total = per_chunk
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let stderr = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64 / total.count as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        value: total.mean,
        stderr,
        samples: cfg.samples,
        seed: cfg.seed,
    })
}
