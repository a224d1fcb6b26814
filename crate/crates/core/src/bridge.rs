//! Stable and Brownian bridges, the rescaled path before the last sign
//! change, and the checks that compare them.
//!
//! Before its last sign change `g_1`, a symmetric stable path rescaled as
//! `u ↦ X_{(u g_1)-} / g_1^{1/α}` is, given its endpoint `a`, a stable bridge
//! from 0 to `a` independent of `g_1`. For α = 2 the endpoint is 0 and the
//! bridge is Brownian. Conditioning on `a` is done by binning; bridges for
//! α < 2 come from endpoint rejection.

use serde::Serialize;

use crate::batch::{self, Workers, CHUNK};
use crate::error::{Error, Result};
use crate::ks::{two_sample_ks, KsReport};
use crate::paths::{self, IncrementSampler, SamplePath};
use crate::rng::{derived_seed, substream, RandomStream, StabilityIndex};

pub const MIN_INDEPENDENCE_PAIRS: usize = 10_000;

/// Width of the endpoint bins used to condition on `a`.
pub const ENDPOINT_BIN_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeSpec {
    pub alpha: StabilityIndex,
    pub length: f64,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl BridgeSpec {
    pub fn new(
        alpha: StabilityIndex,
        length: f64,
        start: f64,
        end: f64,
        steps: usize,
    ) -> Result<Self> {
        if steps < 2 {
            return Err(Error::invalid("steps", "a bridge needs at least 2 steps"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(
                "length",
                format!("{length} is not positive"),
            ));
        }
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid("end", "endpoints must be finite"));
        }
        Ok(BridgeSpec {
            alpha,
            length,
            start,
            end,
            steps,
        })
    }
}

/// Exact Gaussian bridge by sequential conditioning. With the native
/// normalization the free motion has variance `2t`, so the bridge variance
/// at time `s` is `2 s (L - s) / L`.
pub fn sample_brownian_bridge(stream: &mut RandomStream, spec: &BridgeSpec) -> Result<SamplePath> {
    if !spec.alpha.is_brownian() {
        return Err(Error::invalid(
            "alpha",
            "the exact bridge sampler needs alpha = 2",
        ));
    }
    let h = spec.length / spec.steps as f64;
    let mut values = Vec::with_capacity(spec.steps + 1);
    let mut x = spec.start;
    values.push(x);
    for k in 0..spec.steps - 1 {
        let remaining = spec.length - k as f64 * h;
        let mean = x + (spec.end - x) * h / remaining;
        let var = 2.0 * h * (remaining - h) / remaining;
        x = mean + var.sqrt() * stream.standard_normal();
        values.push(x);
    }
    values.push(spec.end);
    SamplePath::from_values(spec.length, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionOutcome {
    pub path: SamplePath,
    pub attempts: u64,
}

fn free_path(
    stream: &mut RandomStream,
    spec: &BridgeSpec,
    inc: &IncrementSampler,
    out: &mut Vec<f64>,
) {
    out.clear();
    let mut x = spec.start;
    out.push(x);
    for _ in 0..spec.steps {
        x += inc.sample(stream);
        out.push(x);
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid(
            "endpoint_tolerance",
            format!("{tol} is not positive"),
        ));
    }
    Ok(())
}

/// Free paths from `spec.start`, kept when the terminal value lands within
/// `endpoint_tolerance` of `spec.end`.
pub fn sample_stable_bridge_rejection(
    stream: &mut RandomStream,
    spec: &BridgeSpec,
    endpoint_tolerance: f64,
    max_attempts: u64,
) -> Result<RejectionOutcome> {
    check_tolerance(endpoint_tolerance)?;
    let inc = IncrementSampler::new(spec.alpha, spec.length / spec.steps as f64);
    let mut buf = Vec::with_capacity(spec.steps + 1);
    for attempt in 1..=max_attempts {
        free_path(stream, spec, &inc, &mut buf);
        if (buf[spec.steps] - spec.end).abs() <= endpoint_tolerance {
            return Ok(RejectionOutcome {
                path: SamplePath::from_values(spec.length, buf)?,
                attempts: attempt,
            });
        }
    }
    Err(Error::AttemptBudget {
        attempts: max_attempts,
        accepted: 0,
        wanted: 1,
    })
}

/// Many rejection bridges; attempt `i` uses `substream(seed, i)` and the
/// first `count` accepted attempts (by index) are returned.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionBatch {
    pub paths: Vec<SamplePath>,
    pub attempts: u64,
}

impl RejectionBatch {
    pub fn acceptance_rate(&self) -> f64 {
        self.paths.len() as f64 / self.attempts as f64
    }
}

pub fn sample_rejection_bridges(
    spec: &BridgeSpec,
    endpoint_tolerance: f64,
    count: usize,
    seed: u64,
    max_attempts: u64,
    workers: Workers,
) -> Result<RejectionBatch> {
    check_tolerance(endpoint_tolerance)?;
    let inc = IncrementSampler::new(spec.alpha, spec.length / spec.steps as f64);
    let round = 16 * CHUNK;
    let mut accepted: Vec<(u64, SamplePath)> = Vec::with_capacity(count);
    let mut next = 0u64;
    while accepted.len() < count && next < max_attempts {
        let end = (next + round).min(max_attempts);
        let ranges: Vec<_> = (next..end)
            .step_by(CHUNK as usize)
            .map(|s| s..(s + CHUNK).min(end))
            .collect();
        let parts = batch::map_ranges(workers, ranges, |range| {
            let mut buf = Vec::with_capacity(spec.steps + 1);
            let mut found = Vec::new();
            for i in range {
                free_path(&mut substream(seed, i), spec, &inc, &mut buf);
                if (buf[spec.steps] - spec.end).abs() <= endpoint_tolerance {
                    found.push((i, buf.clone()));
                }
            }
            found
        })?;
        for (i, values) in parts.into_iter().flatten() {
            if accepted.len() < count {
                accepted.push((i, SamplePath::from_values(spec.length, values)?));
            }
        }
        next = end;
    }
    if accepted.len() < count {
        return Err(Error::AttemptBudget {
            attempts: next,
            accepted: accepted.len() as u64,
            wanted: count as u64,
        });
    }
    let attempts = accepted.last().map_or(0, |(i, _)| i + 1);
    Ok(RejectionBatch {
        paths: accepted.into_iter().map(|(_, p)| p).collect(),
        attempts,
    })
}

/// The path before `g_1`, rescaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaledPreG1 {
    pub path: SamplePath,
    /// Value just before the last sign change, divided by `g_1^{1/α}`.
    pub a: f64,
    pub g1: f64,
}

/// `u ↦ X_{(u g_1)-} / g_1^{1/α}` on a uniform grid of `resample_steps`
/// intervals, with left-constant interpolation. `None` when the path has no
/// sign change on `[0, 1]`.
pub fn rescaled_pre_g1(
    path: &SamplePath,
    alpha: StabilityIndex,
    resample_steps: usize,
) -> Result<Option<RescaledPreG1>> {
    if path.start() != 0.0 {
        return Err(Error::invalid("path", "must start at 0"));
    }
    if path.horizon() < 1.0 - 1e-12 {
        return Err(Error::invalid("path", "horizon must be at least 1"));
    }
    if resample_steps == 0 {
        return Err(Error::invalid("resample_steps", "must be at least 1"));
    }
    let k1 = path.index_at(1.0)?;
    let k = paths::last_sign_change_index(path.values(), k1);
    if k == 0 {
        return Ok(None);
    }
    let g1 = path.time(k);
    let scale = alpha.time_scale(g1);
    let values = path.values();
    let resampled = (0..=resample_steps)
        .map(|j| {
            let idx = ((j as f64 / resample_steps as f64) * k as f64 + 1e-9).floor() as usize;
            values[idx.min(k - 1)] / scale
        })
        .collect();
    Ok(Some(RescaledPreG1 {
        path: SamplePath::from_values(1.0, resampled)?,
        a: values[k - 1] / scale,
        g1,
    }))
}

/// Compact record of one pre-`g_1` sample: the endpoint, `g_1`, and the
/// rescaled values at the requested probe times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreG1Sample {
    pub a: f64,
    pub g1: f64,
    pub probes: Vec<f64>,
}

impl PreG1Sample {
    /// Reflects the sample so that `a ≥ 0`; the reflected path has the same
    /// law by symmetry.
    pub fn sign_normalized(&self) -> PreG1Sample {
        if self.a < 0.0 {
            PreG1Sample {
                a: -self.a,
                g1: self.g1,
                probes: self.probes.iter().map(|v| -v).collect(),
            }
        } else {
            self.clone()
        }
    }
}

/// Simulates `samples` paths on `[0, 1]` and keeps those with a sign change.
pub fn collect_pre_g1(
    alpha: StabilityIndex,
    steps: usize,
    samples: u64,
    seed: u64,
    probes: &[f64],
    workers: Workers,
) -> Result<Vec<PreG1Sample>> {
    if steps < 2 {
        return Err(Error::invalid("steps", "must be at least 2"));
    }
    if let Some(u) = probes.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(Error::invalid("probes", format!("{u} is outside [0, 1]")));
    }
    let dt = 1.0 / steps as f64;
    let inc = IncrementSampler::new(alpha, dt);
    let parts = batch::map_chunks(workers, samples, |range| {
        let mut values = Vec::with_capacity(steps + 1);
        let mut out = Vec::new();
        for i in range {
            let mut stream = substream(seed, i);
            values.clear();
            let mut x = 0.0;
            values.push(x);
            for _ in 0..steps {
                x += inc.sample(&mut stream);
                values.push(x);
            }
            let k = paths::last_sign_change_index(&values, steps);
            if k == 0 {
                continue;
            }
            let g1 = k as f64 * dt;
            let scale = alpha.time_scale(g1);
            let at = |u: f64| {
                let idx = (u * k as f64 + 1e-9).floor() as usize;
                values[idx.min(k - 1)] / scale
            };
            out.push(PreG1Sample {
                a: values[k - 1] / scale,
                g1,
                probes: probes.iter().map(|&u| at(u)).collect(),
            });
        }
        out
    })?;
    Ok(parts.concat())
}

/// Sign-normalized samples whose `|a|` lies in `[low, high)`.
pub fn endpoint_bin(samples: &[PreG1Sample], low: f64, high: f64) -> Vec<PreG1Sample> {
    samples
        .iter()
        .filter(|s| s.a.abs() >= low && s.a.abs() < high)
        .map(PreG1Sample::sign_normalized)
        .collect()
}

/// Splits `(value, g1)` pairs at the median of `g1` and KS-tests the two
/// halves of `value`.
pub fn independence_check(pairs: &[(f64, f64)]) -> Result<KsReport> {
    if pairs.len() < MIN_INDEPENDENCE_PAIRS {
        return Err(Error::invalid(
            "pairs",
            format!(
                "{} pairs; at least {MIN_INDEPENDENCE_PAIRS} are required",
                pairs.len()
            ),
        ));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|x, y| x.1.total_cmp(&y.1));
    let half = sorted.len() / 2;
    let low: Vec<f64> = sorted[..half].iter().map(|p| p.0).collect();
    let high: Vec<f64> = sorted[half..].iter().map(|p| p.0).collect();
    two_sample_ks(&low, &high)
}

/// `u ↦ X_{1-u}`: the grid values in reverse order.
pub fn time_reversal(path: &SamplePath) -> SamplePath {
    let mut values = path.values().to_vec();
    values.reverse();
    SamplePath::from_values(path.horizon(), values).expect("reversal keeps a valid grid")
}

/// Values of each path at time `u · horizon` (left-constant).
pub fn marginal(paths: &[SamplePath], u: f64) -> Result<Vec<f64>> {
    paths.iter().map(|p| p.value_at(u * p.horizon())).collect()
}

/// Probe times of the rescaled pre-`g_1` path compared with the bridge.
pub const PROBES: [f64; 3] = [0.25, 0.5, 0.75];

/// Budget for [`lemma_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConfig {
    pub alpha: StabilityIndex,
    /// Grid steps on `[0, 1]` for the free paths.
    pub steps: usize,
    /// Free paths simulated.
    pub samples: u64,
    pub seed: u64,
    /// Pre-`g_1` samples (and bridge samples) used in the comparisons.
    pub pairs: usize,
    /// `|a|` range the samples are conditioned on; ignored for `α = 2`.
    pub endpoint_bin: (f64, f64),
    /// Grid steps of the reference bridges; a multiple of 4.
    pub bridge_steps: usize,
    #[serde(skip)]
    pub workers: Workers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    /// Paths with a sign change on `[0, 1]`.
    pub collected: usize,
    /// Of those, how many fell in the endpoint bin.
    pub in_bin: usize,
    pub used: usize,
    /// Rescaled value at `u = 1/2` against `g_1`.
    pub independence: KsReport,
    /// Rescaled marginals against the reference bridge at each of [`PROBES`].
    pub marginals: Vec<(f64, KsReport)>,
    /// `g_1` against itself; must fail.
    pub counterexample: KsReport,
    pub bridge_attempts: u64,
    pub bridge_acceptance_rate: f64,
}

impl LemmaReport {
    pub fn midpoint_marginal(&self) -> &KsReport {
        &self.marginals[1].1
    }
}

/// Compares the rescaled pre-`g_1` path with the bridge it should be.
///
/// For `α = 2` every sample is used and the reference is the exact Brownian
/// bridge from 0 to 0. For `α < 2` only samples with `|a|` in the endpoint bin
/// are kept (reflected so that `a > 0`), and the reference is a rejection
/// bridge whose endpoint covers the same bin. The first `pairs` samples by
/// sample index are used.
pub fn lemma_check(cfg: &LemmaConfig) -> Result<LemmaReport> {
    if cfg.pairs < MIN_INDEPENDENCE_PAIRS {
        return Err(Error::invalid(
            "pairs",
            format!("at least {MIN_INDEPENDENCE_PAIRS} are required"),
        ));
    }
    if cfg.bridge_steps == 0 || !cfg.bridge_steps.is_multiple_of(4) {
        return Err(Error::invalid(
            "bridge_steps",
            "must be a positive multiple of 4",
        ));
    }
    let (lo, hi) = cfg.endpoint_bin;
    if !cfg.alpha.is_brownian() && !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid(
            "endpoint_bin",
            format!("[{lo}, {hi}) is not a valid range"),
        ));
    }
    let pre = collect_pre_g1(
        cfg.alpha,
        cfg.steps,
        cfg.samples,
        cfg.seed,
        &PROBES,
        cfg.workers,
    )?;
    let selected = if cfg.alpha.is_brownian() {
        pre.clone()
    } else {
        endpoint_bin(&pre, lo, hi)
    };
    if selected.len() < cfg.pairs {
        return Err(Error::AttemptBudget {
            attempts: cfg.samples,
            accepted: selected.len() as u64,
            wanted: cfg.pairs as u64,
        });
    }
    let used = &selected[..cfg.pairs];

    let bridge_seed = derived_seed(cfg.seed, 2);
    let (bridges, attempts) = if cfg.alpha.is_brownian() {
        let spec = BridgeSpec::new(cfg.alpha, 1.0, 0.0, 0.0, cfg.bridge_steps)?;
        let parts = batch::map_chunks(cfg.workers, cfg.pairs as u64, |range| {
            range
                .map(|i| sample_brownian_bridge(&mut substream(bridge_seed, i), &spec))
                .collect::<Result<Vec<_>>>()
        })?;
        let mut paths = Vec::with_capacity(cfg.pairs);
        for part in parts {
            paths.extend(part?);
        }
        (paths, cfg.pairs as u64)
    } else {
        let spec = BridgeSpec::new(cfg.alpha, 1.0, 0.0, 0.5 * (lo + hi), cfg.bridge_steps)?;
        let budget = (cfg.pairs as u64).saturating_mul(100_000);
        let b = sample_rejection_bridges(
            &spec,
            0.5 * (hi - lo),
            cfg.pairs,
            bridge_seed,
            budget,
            cfg.workers,
        )?;
        (b.paths, b.attempts)
    };

    let at_half: Vec<(f64, f64)> = used.iter().map(|p| (p.probes[1], p.g1)).collect();
    let marginals = PROBES
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let pre_u: Vec<f64> = used.iter().map(|p| p.probes[j]).collect();
            Ok((u, two_sample_ks(&pre_u, &marginal(&bridges, u)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let dependent: Vec<(f64, f64)> = used.iter().map(|p| (p.g1, p.g1)).collect();
    Ok(LemmaReport {
        collected: pre.len(),
        in_bin: selected.len(),
        used: cfg.pairs,
        independence: independence_check(&at_half)?,
        marginals,
        counterexample: independence_check(&dependent)?,
        bridge_attempts: attempts,
        bridge_acceptance_rate: cfg.pairs as f64 / attempts as f64,
    })
}
