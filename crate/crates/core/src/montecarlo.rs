//! Simple random walks as an independent check of harmonic measure.
//!
//! A walk started at an interior point moves to one of its `2m` neighbors
//! uniformly at random until it reaches the boundary. The exit distribution
//! is the discrete harmonic measure, so `E[f(exit)]` is the solution of the
//! Dirichlet problem with data `f`.
//!
//! Sample `i` uses its own ChaCha8 stream (global seed, stream id `i`), so the
//! estimate does not depend on how samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{GridDomain, LatticePoint};

pub const MIN_SAMPLES: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkConfig {
    pub seed: u64,
    pub samples: u64,
    /// Per-walk step cap; `None` means `100·diameter²`.
    pub max_steps: Option<u64>,
}

impl WalkConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        WalkConfig {
            seed,
            samples,
            max_steps: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExitEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    /// Walks whose exit value was nonzero.
    pub hits: u64,
    /// Walks stopped by the step cap; they contribute `0`.
    pub stopped: u64,
}

impl ExitEstimate {
    pub fn stop_fraction(&self) -> f64 {
        self.stopped as f64 / self.samples as f64
    }
}

/// Largest bounding-box extent of the closure, in lattice steps.
pub fn diameter_steps(domain: &GridDomain) -> u64 {
    domain
        .bounding_box()
        .iter()
        .map(|(lo, hi)| (hi - lo) as u64)
        .max()
        .unwrap_or(0)
}

fn walk(domain: &GridDomain, start: usize, rng: &mut ChaCha8Rng, max_steps: u64) -> Option<usize> {
    let k = domain.num_interior();
    let deg = 2 * domain.dimension();
    let mut at = start;
    let mut steps = 0;
    while at < k {
        if steps == max_steps {
            return None;
        }
        at = domain.neighbors(at)[rng.random_range(0..deg)];
        steps += 1;
    }
    Some(at - k)
}

/// Monte Carlo estimate of `E[f(exit)]` for walks from `start`, with `f`
/// given in the domain's boundary order.
pub fn estimate_exit_value(
    domain: &GridDomain,
    start: &LatticePoint,
    boundary_values: &[f64],
    cfg: &WalkConfig,
) -> Result<ExitEstimate> {
    if boundary_values.len() != domain.num_boundary() {
        return Err(Error::DimensionMismatch {
            expected: domain.num_boundary(),
            found: boundary_values.len(),
        });
    }
    if cfg.samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {}",
            cfg.samples
        )));
    }
    let s = domain
        .index_of(start)
        .filter(|&i| domain.is_interior_index(i))
        .ok_or_else(|| Error::NotInterior(start.coords().to_vec()))?;
    let max_steps = cfg
        .max_steps
        .unwrap_or_else(|| 100 * diameter_steps(domain).pow(2))
        .max(1);

    let one = |i: u64| -> (f64, bool, bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        match walk(domain, s, &mut rng, max_steps) {
            Some(b) => {
                let v = boundary_values[b];
                (v, v != 0.0, false)
            }
            None => (0.0, false, true),
        }
    };
    let fold = |acc: (f64, f64, u64, u64), (v, hit, stop): (f64, bool, bool)| {
        (acc.0 + v, acc.1 + v * v, acc.2 + hit as u64, acc.3 + stop as u64)
    };
    let merge = |a: (f64, f64, u64, u64), b: (f64, f64, u64, u64)| {
        (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3)
    };
    let zero = (0.0, 0.0, 0u64, 0u64);

    // Fixed-size chunks keep the floating-point summation order independent
    // of the thread count.
    const CHUNK: u64 = 4096;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let chunk_sum = |c: u64| {
        let hi = ((c + 1) * CHUNK).min(cfg.samples);
        (c * CHUNK..hi).map(one).fold(zero, fold)
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<_> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(chunk_sum).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<_> = (0..chunks).map(chunk_sum).collect();
    let (sum, sum_sq, hits, stopped) = partials.into_iter().fold(zero, merge);

    let n = cfg.samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(ExitEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
        samples: cfg.samples,
        hits,
        stopped,
    })
}

/// Probability that a walk from `start` exits through `target`
/// (boundary positions). The standard error is `√(p̂(1−p̂)/samples)`.
pub fn estimate_exit_probability(
    domain: &GridDomain,
    start: &LatticePoint,
    target: &[usize],
    cfg: &WalkConfig,
) -> Result<ExitEstimate> {
    let mut f = vec![0.0; domain.num_boundary()];
    for &t in target {
        if t >= f.len() {
            return Err(Error::InvalidArgument(format!(
                "boundary position {t} out of range 0..{}",
                f.len()
            )));
        }
        f[t] = 1.0;
    }
    let mut e = estimate_exit_value(domain, start, &f, cfg)?;
    let p = e.estimate;
    e.stderr = (p * (1.0 - p) / e.samples as f64).sqrt();
    Ok(e)
}
