//! Plain Monte Carlo checks of the Mellin transform of `∏|N_i|` and of the
//! tail of a product of two Pareto variables.

use serde::Serialize;

use super::bernoulli::BernoulliEstimate;
use super::monte_carlo::Curve;
use crate::batch::{self, Workers};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl MeanEstimate {
    /// `(mean - target) / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}

/// Running mean and sum of squared deviations, merged with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }
}

/// `E ∏_{i=1}^n |N_i|^ν` estimated from `samples` draws of `n` standard
/// normals.
pub fn mellin_moment_mc(
    nu: f64,
    n: u32,
    samples: u64,
    seed: u64,
    workers: Workers,
) -> Result<MeanEstimate> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", format!("{nu} must exceed -1")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if samples < 2 {
        return Err(Error::invalid("samples", "at least 2 draws are needed"));
    }
    let m = batch::fold_chunks(
        workers,
        samples,
        Moments::default(),
        |range| {
            let mut m = Moments::default();
            for i in range {
                let mut s = substream(seed, i);
                let prod: f64 = (0..n).map(|_| s.standard_normal().abs()).product();
                m.push(libm::pow(prod, nu));
            }
            m
        },
        Moments::merge,
    )?;
    Ok(MeanEstimate {
        mean: m.mean,
        stderr: (m.m2 / (m.count - 1) as f64 / m.count as f64).sqrt(),
        samples,
    })
}

/// `P(XY ≥ z)` for i.i.d. `X, Y` with `P(X ≥ t) = t^{-ν}` on `t ≥ 1`,
/// sampled as `U^{-1/ν}`. All `z` share the same pairs.
pub fn pareto_product_tail_mc(
    nu: f64,
    zs: &[f64],
    samples: u64,
    seed: u64,
    workers: Workers,
) -> Result<Curve> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", format!("{nu} is not positive")));
    }
    if zs.is_empty() {
        return Err(Error::invalid("z", "at least one threshold is required"));
    }
    if let Some(z) = zs.iter().find(|z| !(**z >= 1.0) || !z.is_finite()) {
        return Err(Error::invalid("z", format!("{z} is below 1")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let counts = batch::fold_chunks(
        workers,
        samples,
        vec![0u64; zs.len()],
        |range| {
            let mut c = vec![0u64; zs.len()];
            for i in range {
                let mut s = substream(seed, i);
                let x = libm::pow(s.uniform_open(), -1.0 / nu);
                let y = libm::pow(s.uniform_open(), -1.0 / nu);
                for (slot, &z) in c.iter_mut().zip(zs) {
                    if x * y >= z {
                        *slot += 1;
                    }
                }
            }
            c
        },
        |mut acc, part| {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
            acc
        },
    )?;
    Ok(zs
        .iter()
        .zip(counts)
        .map(|(&z, k)| (z, BernoulliEstimate::from_counts(k, samples)))
        .collect())
}
