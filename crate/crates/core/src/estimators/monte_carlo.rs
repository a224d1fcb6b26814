//! Monte Carlo drivers. Sample `i` always uses `substream(seed, i)`, and all
//! thresholds of one call are evaluated on the same ensembles, so the
//! estimated curves are exactly monotone.

use serde::Serialize;

use super::bernoulli::BernoulliEstimate;
use crate::batch::{self, Workers};
use crate::error::{Error, Result};
use crate::paths::{self, EnsembleSummary, IncrementSampler};
use crate::rng::{derived_seed, substream, StabilityIndex};

pub const MIN_SAMPLES: u64 = 1000;

/// Simulation budget for product-ensemble experiments on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub alpha: StabilityIndex,
    pub n: usize,
    pub steps: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip)]
    pub workers: Workers,
}

impl SimConfig {
    pub fn new(alpha: StabilityIndex, n: usize, steps: usize, samples: u64, seed: u64) -> Self {
        SimConfig {
            alpha,
            n,
            steps,
            samples,
            seed,
            workers: Workers::default(),
        }
    }

    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::invalid(
                "samples",
                format!("{} is below the minimum of {MIN_SAMPLES}", self.samples),
            ));
        }
        Ok(())
    }
}

/// Seed of the independent ensemble used for the `2 × steps` refinement run.
pub fn refinement_seed(seed: u64) -> u64 {
    derived_seed(seed, 1)
}

/// Simulates `cfg.samples` ensembles and lets `classify` bump any of
/// `counters` tallies per ensemble.
pub fn count_ensembles<F>(cfg: &SimConfig, counters: usize, classify: F) -> Result<Vec<u64>>
where
    F: Fn(&EnsembleSummary, &mut [u64]) + Sync,
{
    cfg.validate()?;
    let inc = IncrementSampler::new(cfg.alpha, 1.0 / cfg.steps as f64);
    batch::fold_chunks(
        cfg.workers,
        cfg.samples,
        vec![0u64; counters],
        |range| {
            let mut counts = vec![0u64; counters];
            let mut buf = Vec::with_capacity(cfg.n);
            for i in range {
                let mut stream = substream(cfg.seed, i);
                let s = paths::summarize_ensemble(&mut stream, &inc, cfg.n, cfg.steps, &mut buf);
                classify(&s, &mut counts);
            }
            counts
        },
        |mut acc, part| {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
            acc
        },
    )
}

fn check_thresholds(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(name, "at least one threshold is required"));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(name, format!("{v} is not positive")));
    }
    Ok(())
}

pub type Curve = Vec<(f64, BernoulliEstimate)>;

/// `P(S_n ≤ ε)` for every `ε` in `epsilons` (native units).
pub fn estimate_persistence(cfg: &SimConfig, epsilons: &[f64]) -> Result<Curve> {
    check_thresholds("eps", epsilons)?;
    let counts = count_ensembles(cfg, epsilons.len(), |s, c| {
        for (slot, &eps) in c.iter_mut().zip(epsilons) {
            if s.sup_product <= eps {
                *slot += 1;
            }
        }
    })?;
    Ok(curve(epsilons, &counts, cfg.samples))
}

/// `P(S_n ≥ x)` for every `x` in `xs` (native units).
pub fn estimate_upper_tail(cfg: &SimConfig, xs: &[f64]) -> Result<Curve> {
    check_thresholds("x", xs)?;
    let counts = count_ensembles(cfg, xs.len(), |s, c| {
        for (slot, &x) in c.iter_mut().zip(xs) {
            if s.sup_product >= x {
                *slot += 1;
            }
        }
    })?;
    Ok(curve(xs, &counts, cfg.samples))
}

/// Persistence and upper-tail curves from one set of ensembles.
pub fn estimate_sup_curves(
    cfg: &SimConfig,
    epsilons: &[f64],
    xs: &[f64],
) -> Result<(Curve, Curve)> {
    check_thresholds("eps", epsilons)?;
    check_thresholds("x", xs)?;
    let m = epsilons.len();
    let counts = count_ensembles(cfg, m + xs.len(), |s, c| {
        let (low, high) = c.split_at_mut(m);
        for (slot, &eps) in low.iter_mut().zip(epsilons) {
            if s.sup_product <= eps {
                *slot += 1;
            }
        }
        for (slot, &x) in high.iter_mut().zip(xs) {
            if s.sup_product >= x {
                *slot += 1;
            }
        }
    })?;
    Ok((
        curve(epsilons, &counts[..m], cfg.samples),
        curve(xs, &counts[m..], cfg.samples),
    ))
}

fn curve(thresholds: &[f64], counts: &[u64], trials: u64) -> Curve {
    thresholds
        .iter()
        .zip(counts)
        .map(|(&t, &k)| (t, BernoulliEstimate::from_counts(k, trials)))
        .collect()
}

/// Fails with [`Error::ZeroCount`] at the first empty cell.
pub fn require_nonzero(curve: &[(f64, BernoulliEstimate)]) -> Result<()> {
    match curve.iter().find(|(_, e)| e.successes == 0) {
        Some((t, e)) => Err(Error::ZeroCount {
            threshold: *t,
            trials: e.trials,
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `P(S_n ≤ threshold)`
    Persistence,
    /// `P(S_n ≥ threshold)`
    UpperTail,
}

/// The same probability at `steps` and at `2 × steps`, on independent
/// ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementReport {
    pub functional: Functional,
    pub threshold: f64,
    pub coarse_steps: usize,
    pub fine_steps: usize,
    pub coarse: BernoulliEstimate,
    pub fine: BernoulliEstimate,
}

impl RefinementReport {
    /// `coarse - fine`.
    pub fn gap(&self) -> f64 {
        self.coarse.p_hat - self.fine.p_hat
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap().abs() / self.fine.p_hat.max(f64::MIN_POSITIVE)
    }

    pub fn combined_stderr(&self) -> f64 {
        self.coarse.stderr().hypot(self.fine.stderr())
    }

    /// Whether the refinement moved in the direction grid monitoring
    /// predicts, up to `k` combined standard errors.
    pub fn consistent_direction(&self, k: f64) -> bool {
        let slack = k * self.combined_stderr();
        match self.functional {
            Functional::Persistence => self.fine.p_hat <= self.coarse.p_hat + slack,
            Functional::UpperTail => self.fine.p_hat >= self.coarse.p_hat - slack,
        }
    }
}

pub fn refinement_report(
    cfg: &SimConfig,
    functional: Functional,
    threshold: f64,
) -> Result<RefinementReport> {
    Ok(refinement_reports(cfg, functional, &[threshold])?.remove(0))
}

/// Refinement reports for several thresholds, each run sharing its ensembles
/// across thresholds.
pub fn refinement_reports(
    cfg: &SimConfig,
    functional: Functional,
    thresholds: &[f64],
) -> Result<Vec<RefinementReport>> {
    let coarse = estimate(cfg, functional, thresholds)?;
    refine_curve(cfg, functional, &coarse)
}

/// Pairs an existing `cfg.steps` curve with a fresh `2 × cfg.steps` run.
pub fn refine_curve(
    cfg: &SimConfig,
    functional: Functional,
    coarse: &[(f64, BernoulliEstimate)],
) -> Result<Vec<RefinementReport>> {
    let thresholds: Vec<f64> = coarse.iter().map(|(t, _)| *t).collect();
    let fine_cfg = cfg
        .with_steps(cfg.steps * 2)
        .with_seed(refinement_seed(cfg.seed));
    let fine = estimate(&fine_cfg, functional, &thresholds)?;
    Ok(coarse
        .iter()
        .zip(fine)
        .map(|(&(threshold, coarse), (_, fine))| RefinementReport {
            functional,
            threshold,
            coarse_steps: cfg.steps,
            fine_steps: fine_cfg.steps,
            coarse,
            fine,
        })
        .collect())
}

pub fn estimate(cfg: &SimConfig, functional: Functional, thresholds: &[f64]) -> Result<Curve> {
    match functional {
        Functional::Persistence => estimate_persistence(cfg, thresholds),
        Functional::UpperTail => estimate_upper_tail(cfg, thresholds),
    }
}

/// Empirical check of `P(∏Z_1 ≥ x) ≤ P(S_n ≥ x) ≤ 2^n P(∏ sup Z ≥ x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub threshold: f64,
    pub n: usize,
    /// `P(S_n ≥ x)`.
    pub sup_tail: BernoulliEstimate,
    /// `P(∏ Z_1 ≥ x)`, the product at the horizon.
    pub terminal_tail: BernoulliEstimate,
    /// `P(∏ sup Z ≥ x)`.
    pub sup_product_tail: BernoulliEstimate,
    /// Ensembles with `S_n < ∏ Z_1`; always 0.
    pub lower_violations: u64,
}

impl SandwichReport {
    pub fn upper_bound(&self) -> f64 {
        2f64.powi(self.n as i32) * self.sup_product_tail.p_hat
    }

    pub fn lower_holds(&self) -> bool {
        self.lower_violations == 0 && self.terminal_tail.successes <= self.sup_tail.successes
    }

    /// Upper bound up to `k` combined standard errors.
    pub fn upper_holds(&self, k: f64) -> bool {
        let scale = 2f64.powi(self.n as i32);
        let se = self
            .sup_tail
            .stderr()
            .hypot(scale * self.sup_product_tail.stderr());
        self.sup_tail.p_hat <= self.upper_bound() + k * se
    }
}

pub fn sandwich_check(cfg: &SimConfig, x: f64) -> Result<SandwichReport> {
    check_thresholds("x", &[x])?;
    let c = count_ensembles(cfg, 4, |s, c| {
        if s.sup_product >= x {
            c[0] += 1;
        }
        if s.terminal_product >= x {
            c[1] += 1;
        }
        if s.path_sups.iter().product::<f64>() >= x {
            c[2] += 1;
        }
        if s.sup_product < s.terminal_product {
            c[3] += 1;
        }
    })?;
    let e = |k| BernoulliEstimate::from_counts(k, cfg.samples);
    Ok(SandwichReport {
        threshold: x,
        n: cfg.n,
        sup_tail: e(c[0]),
        terminal_tail: e(c[1]),
        sup_product_tail: e(c[2]),
        lower_violations: c[3],
    })
}

/// Single-path budget on `[0, horizon]` for first-passage and
/// sign-change experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathConfig {
    pub alpha: StabilityIndex,
    pub horizon: f64,
    pub steps: usize,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip)]
    pub workers: Workers,
}

impl PathConfig {
    pub fn new(alpha: StabilityIndex, horizon: f64, steps: usize, samples: u64, seed: u64) -> Self {
        PathConfig {
            alpha,
            horizon,
            steps,
            samples,
            seed,
            workers: Workers::default(),
        }
    }

    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::invalid(
                "horizon",
                format!("{} is not positive", self.horizon),
            ));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be positive"));
        }
        Ok(())
    }
}

/// `P_start(T_0 ≥ t)` for each `t` in `times`, from paths started at
/// `start > 0` (native units). Paths stop at their first nonpositive value.
pub fn estimate_survival(cfg: &PathConfig, start: f64, times: &[f64]) -> Result<Curve> {
    cfg.validate()?;
    check_thresholds("t", times)?;
    if !(start > 0.0) {
        return Err(Error::invalid("start", format!("{start} is not positive")));
    }
    if let Some(t) = times.iter().find(|&&t| t > cfg.horizon * (1.0 + 1e-12)) {
        return Err(Error::invalid(
            "t",
            format!("{t} exceeds the horizon {}", cfg.horizon),
        ));
    }
    let dt = cfg.horizon / cfg.steps as f64;
    let inc = IncrementSampler::new(cfg.alpha, dt);
    let counts = batch::fold_chunks(
        cfg.workers,
        cfg.samples,
        vec![0u64; times.len()],
        |range| {
            let mut counts = vec![0u64; times.len()];
            for i in range {
                let mut stream = substream(cfg.seed, i);
                let mut x = start;
                let mut hit = None;
                for k in 1..=cfg.steps {
                    x += inc.sample(&mut stream);
                    if x <= 0.0 {
                        hit = Some(k as f64 * dt);
                        break;
                    }
                }
                for (slot, &t) in counts.iter_mut().zip(times) {
                    if hit.is_none_or(|h| h >= t * (1.0 - 1e-12)) {
                        *slot += 1;
                    }
                }
            }
            counts
        },
        |mut acc, part| {
            for (a, p) in acc.iter_mut().zip(part) {
                *a += p;
            }
            acc
        },
    )?;
    Ok(curve(times, &counts, cfg.samples))
}

/// `g_t` at `t = horizon` for every sample, in sample order.
pub fn sample_last_sign_changes(cfg: &PathConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let dt = cfg.horizon / cfg.steps as f64;
    let inc = IncrementSampler::new(cfg.alpha, dt);
    let parts = batch::map_chunks(cfg.workers, cfg.samples, |range| {
        range
            .map(|i| {
                let mut stream = substream(cfg.seed, i);
                let (mut prev, mut last) = (0.0, 0usize);
                for k in 1..=cfg.steps {
                    let cur = prev + inc.sample(&mut stream);
                    if prev * cur <= 0.0 {
                        last = if prev == 0.0 && cur != 0.0 { k - 1 } else { k };
                    }
                    prev = cur;
                }
                last as f64 * dt
            })
            .collect::<Vec<f64>>()
    })?;
    Ok(parts.concat())
}

/// Log-spaced histogram of small values and its fitted density slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySlope {
    pub bins: Vec<DensityBin>,
    pub slope: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBin {
    pub low: f64,
    pub high: f64,
    pub mass: BernoulliEstimate,
    pub density: f64,
}

/// Fits `ln density ≈ c + slope · ln r` over bins with edges `edges`
/// (geometric midpoints), weights from the bin counts.
pub fn fit_density_slope(values: &[f64], edges: &[f64]) -> Result<DensitySlope> {
    if edges.len() < super::fit::MIN_FIT_POINTS + 1 {
        return Err(Error::DegenerateDesign("too few bins".into()));
    }
    if edges.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
        return Err(Error::invalid(
            "edges",
            "bin edges must be positive and increasing",
        ));
    }
    if values.is_empty() {
        return Err(Error::invalid("values", "no samples"));
    }
    let total = values.len() as u64;
    let bins: Vec<DensityBin> = edges
        .windows(2)
        .map(|w| {
            let k = values.iter().filter(|&&v| v >= w[0] && v < w[1]).count() as u64;
            let mass = BernoulliEstimate::from_counts(k, total);
            DensityBin {
                low: w[0],
                high: w[1],
                mass,
                density: mass.p_hat / (w[1] - w[0]),
            }
        })
        .collect();
    if let Some(b) = bins.iter().find(|b| b.mass.successes == 0) {
        return Err(Error::ZeroCount {
            threshold: b.low,
            trials: total,
        });
    }
    let rows: Vec<Vec<f64>> = bins
        .iter()
        .map(|b| vec![1.0, (b.low * b.high).sqrt().ln()])
        .collect();
    let y: Vec<f64> = bins.iter().map(|b| b.density.ln()).collect();
    let w: Vec<f64> = bins
        .iter()
        .map(|b| b.mass.successes as f64 / (1.0 - b.mass.p_hat).max(1e-12))
        .collect();
    let sol = super::fit::weighted_least_squares(&rows, &y, &w)?;
    Ok(DensitySlope {
        slope: sol.coef[1],
        stderr: sol.covariance[1][1].sqrt(),
        r_squared: sol.r_squared,
        bins,
    })
}

/// Fraction of `values` at or below `r`.
pub fn empirical_cdf(values: &[f64], r: f64) -> Result<BernoulliEstimate> {
    if values.is_empty() {
        return Err(Error::invalid("values", "no samples"));
    }
    let k = values.iter().filter(|&&v| v <= r).count() as u64;
    Ok(BernoulliEstimate::from_counts(k, values.len() as u64))
}
