use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_Z: f64 = 1.96;

/// Monte Carlo probability estimate with its exact counts and a Wilson
/// score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub z: f64,
}

impl BernoulliEstimate {
    pub fn new(successes: u64, trials: u64, z: f64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, z)?;
        Ok(BernoulliEstimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            z,
        })
    }

    pub(crate) fn from_counts(successes: u64, trials: u64) -> Self {
        // counts come from our own tallies, so the preconditions hold
        Self::new(successes, trials, DEFAULT_Z).expect("successes <= trials, trials > 0")
    }

    /// Binomial standard error `sqrt(p̂(1-p̂)/n)`.
    pub fn stderr(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    /// Pooled estimate of two disjoint batches.
    pub fn merge(&self, other: &BernoulliEstimate) -> Result<Self> {
        Self::new(
            self.successes + other.successes,
            self.trials + other.trials,
            self.z,
        )
    }

    pub fn complement(&self) -> Self {
        Self::new(self.trials - self.successes, self.trials, self.z).expect("valid counts")
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    if successes > trials {
        return Err(Error::invalid(
            "successes",
            format!("{successes} exceeds {trials} trials"),
        ));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::invalid("z", format!("{z} is not a valid quantile")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((low, high))
}
