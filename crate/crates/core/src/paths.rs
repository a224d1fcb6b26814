//! Discretized stable paths and the path functionals built on them.
//!
//! Continuous-time functionals are monitored on the uniform grid only. The
//! grid supremum never exceeds the true supremum, so grid persistence
//! probabilities are biased upward, grid tail probabilities downward and
//! grid first-passage times upward.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{PositiveStable, RandomStream, StabilityIndex, SymmetricStable};

/// Values on the uniform grid `k · horizon / steps`, `k = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath {
    horizon: f64,
    values: Vec<f64>,
}

impl SamplePath {
    /// Wraps precomputed grid values; `values[0]` is the start.
    pub fn from_values(horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(
                "horizon",
                format!("{horizon} is not positive"),
            ));
        }
        if values.len() < 2 {
            return Err(Error::invalid("steps", "a path needs at least one step"));
        }
        Ok(SamplePath { horizon, values })
    }

    pub fn start(&self) -> f64 {
        self.values[0]
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.steps()]
    }

    /// Largest grid index whose time does not exceed `t`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        grid_index(t, self.dt(), self.steps())
    }

    /// Left-constant (càdlàg) value at an arbitrary time in `[0, horizon]`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.index_at(t)?])
    }
}

fn grid_index(t: f64, dt: f64, steps: usize) -> Result<usize> {
    let horizon = dt * steps as f64;
    if !(t >= 0.0) || t > horizon * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "t",
            format!("{t} is outside [0, {horizon}]"),
        ));
    }
    Ok(((t / dt + 1e-9).floor() as usize).min(steps))
}

fn check_grid(horizon: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is not positive"),
        ));
    }
    Ok(())
}

/// Symmetric stable increments over a step of length `dt`.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    unit: SymmetricStable,
    scale: f64,
}

impl IncrementSampler {
    pub fn new(alpha: StabilityIndex, dt: f64) -> Self {
        IncrementSampler {
            unit: SymmetricStable::new(alpha),
            scale: alpha.time_scale(dt),
        }
    }

    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.scale * self.unit.sample(stream)
    }
}

/// Random walk with i.i.d. stable increments of scale `(horizon/steps)^{1/α}`.
pub fn simulate_path(
    stream: &mut RandomStream,
    alpha: StabilityIndex,
    start: f64,
    horizon: f64,
    steps: usize,
) -> Result<SamplePath> {
    check_grid(horizon, steps)?;
    let inc = IncrementSampler::new(alpha, horizon / steps as f64);
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = start;
    values.push(x);
    for _ in 0..steps {
        x += inc.sample(stream);
        values.push(x);
    }
    Ok(SamplePath { horizon, values })
}

/// Brownian motion run on an independent `α/2`-stable clock, started at 0.
///
/// The clock increments over `dt` have Laplace transform
/// `exp(-2^{α/2} dt λ^{α/2})`, which makes `B_τ` match the native stable
/// normalization.
pub fn simulate_subordinated_path(
    stream: &mut RandomStream,
    alpha: StabilityIndex,
    horizon: f64,
    steps: usize,
) -> Result<SamplePath> {
    check_grid(horizon, steps)?;
    if alpha.is_brownian() {
        return Err(Error::invalid("alpha", "subordination needs alpha < 2"));
    }
    let a = alpha.value();
    let dt = horizon / steps as f64;
    let clock = PositiveStable::new(a / 2.0, libm::pow(2.0, a / 2.0) * dt)?;
    let mut values = Vec::with_capacity(steps + 1);
    let mut x = 0.0;
    values.push(x);
    for _ in 0..steps {
        let dtau = clock.sample(stream);
        x += dtau.sqrt() * stream.standard_normal();
        values.push(x);
    }
    Ok(SamplePath { horizon, values })
}

/// `n` independent paths on a shared grid, all started at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductEnsemble {
    paths: Vec<SamplePath>,
}

impl ProductEnsemble {
    pub fn new(paths: Vec<SamplePath>) -> Result<Self> {
        let first = paths
            .first()
            .ok_or_else(|| Error::invalid("n", "an ensemble needs at least one path"))?;
        for p in &paths {
            if p.steps() != first.steps() || p.horizon() != first.horizon() {
                return Err(Error::invalid("paths", "paths do not share one grid"));
            }
            if p.start() != 0.0 {
                return Err(Error::invalid("paths", "ensemble paths must start at 0"));
            }
        }
        Ok(ProductEnsemble { paths })
    }

    /// Simulates `n` paths, drawing the `n` increments of each step in turn
    /// (the same order [`summarize_ensemble`] uses).
    pub fn simulate(
        stream: &mut RandomStream,
        alpha: StabilityIndex,
        n: usize,
        horizon: f64,
        steps: usize,
    ) -> Result<Self> {
        check_grid(horizon, steps)?;
        if n == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        let inc = IncrementSampler::new(alpha, horizon / steps as f64);
        let mut values = vec![Vec::with_capacity(steps + 1); n];
        for v in values.iter_mut() {
            v.push(0.0);
        }
        for k in 0..steps {
            for v in values.iter_mut() {
                let next = v[k] + inc.sample(stream);
                v.push(next);
            }
        }
        Ok(ProductEnsemble {
            paths: values
                .into_iter()
                .map(|values| SamplePath { horizon, values })
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[SamplePath] {
        &self.paths
    }

    pub fn horizon(&self) -> f64 {
        self.paths[0].horizon()
    }

    pub fn steps(&self) -> usize {
        self.paths[0].steps()
    }

    pub fn product_at(&self, k: usize) -> f64 {
        self.paths.iter().map(|p| p.values[k]).product()
    }
}

/// Grid supremum of the coordinate product. Always `>= 0` (the `k = 0` term).
pub fn sup_product(ensemble: &ProductEnsemble) -> f64 {
    (0..=ensemble.steps())
        .map(|k| ensemble.product_at(k))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// First grid time at which the coordinate product reaches `level`.
pub fn first_entrance_time(ensemble: &ProductEnsemble, level: f64) -> Option<f64> {
    (0..=ensemble.steps())
        .find(|&k| ensemble.product_at(k) >= level)
        .map(|k| ensemble.paths[0].time(k))
}

/// Grid index of the last sign change in `values[..=k_max]`, or 0.
///
/// A step `k-1 → k` changes sign when `values[k-1] · values[k] <= 0`. The
/// change is dated at `k`, except when the path sits exactly at zero at
/// `k-1` and leaves it, in which case it is dated at `k-1`.
pub fn last_sign_change_index(values: &[f64], k_max: usize) -> usize {
    for k in (1..=k_max).rev() {
        let (prev, cur) = (values[k - 1], values[k]);
        if prev * cur <= 0.0 {
            return if prev == 0.0 && cur != 0.0 { k - 1 } else { k };
        }
    }
    0
}

/// `g_t`: last sign change on `[0, t]`, 0 when there is none.
pub fn last_sign_change(path: &SamplePath, t: f64) -> Result<f64> {
    let k = path.index_at(t)?;
    Ok(path.time(last_sign_change_index(&path.values, k)))
}

pub fn first_nonpositive_index(values: &[f64]) -> Option<usize> {
    values.iter().position(|&v| v <= 0.0)
}

/// `T_0`: first grid time with a nonpositive value, for a path started above 0.
pub fn first_passage_nonpositive(path: &SamplePath) -> Result<Option<f64>> {
    if !(path.start() > 0.0) {
        return Err(Error::invalid(
            "start",
            format!("first passage needs a positive start, got {}", path.start()),
        ));
    }
    Ok(first_nonpositive_index(&path.values).map(|k| path.time(k)))
}

/// First grid index in `values[..=k_max]` attaining the maximum.
pub fn argmax_index(values: &[f64], k_max: usize) -> usize {
    let mut best = 0;
    for k in 1..=k_max {
        if values[k] > values[best] {
            best = k;
        }
    }
    best
}

/// First grid time in `[0, window_end]` at which the running maximum is attained.
pub fn argmax_time(path: &SamplePath, window_end: f64) -> Result<f64> {
    let k = path.index_at(window_end)?;
    Ok(path.time(argmax_index(&path.values, k)))
}

/// Functionals of a product ensemble needed by the estimators, computed
/// without storing the paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    /// Grid supremum of the product.
    pub sup_product: f64,
    /// Product at the horizon.
    pub terminal_product: f64,
    /// Grid supremum of each coordinate.
    pub path_sups: Vec<f64>,
}

/// Streams one ensemble through the same draw order as
/// [`ProductEnsemble::simulate`].
pub fn summarize_ensemble(
    stream: &mut RandomStream,
    inc: &IncrementSampler,
    n: usize,
    steps: usize,
    current: &mut Vec<f64>,
) -> EnsembleSummary {
    current.clear();
    current.resize(n, 0.0);
    let mut path_sups = vec![0.0; n];
    let mut sup_product: f64 = 0.0;
    match n {
        1 => {
            let mut x = 0.0;
            let mut sup: f64 = 0.0;
            for _ in 0..steps {
                x += inc.sample(stream);
                sup = sup.max(x);
            }
            current[0] = x;
            path_sups[0] = sup;
            sup_product = sup;
        }
        2 => {
            let (mut x, mut y) = (0.0, 0.0);
            let (mut sx, mut sy): (f64, f64) = (0.0, 0.0);
            for _ in 0..steps {
                x += inc.sample(stream);
                y += inc.sample(stream);
                sx = sx.max(x);
                sy = sy.max(y);
                sup_product = sup_product.max(x * y);
            }
            current[0] = x;
            current[1] = y;
            path_sups[0] = sx;
            path_sups[1] = sy;
        }
        _ => {
            for _ in 0..steps {
                let mut prod = 1.0;
                for (v, s) in current.iter_mut().zip(path_sups.iter_mut()) {
                    *v += inc.sample(stream);
                    *s = f64::max(*s, *v);
                    prod *= *v;
                }
                sup_product = sup_product.max(prod);
            }
        }
    }
    EnsembleSummary {
        sup_product,
        terminal_product: current.iter().product(),
        path_sups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn path(values: &[f64]) -> SamplePath {
        SamplePath::from_values((values.len() - 1) as f64, values.to_vec()).unwrap()
    }

    #[test]
    fn sup_product_hand_enumeration() {
        let e =
            ProductEnsemble::new(vec![path(&[0.0, 1.0, 2.0]), path(&[0.0, 3.0, -1.0])]).unwrap();
        assert_eq!(sup_product(&e), 3.0);
        let e = ProductEnsemble::new(vec![path(&[0.0, -1.0, -2.0])]).unwrap();
        assert_eq!(sup_product(&e), 0.0);
    }

    #[test]
    fn ensemble_rejects_mismatched_grids_and_nonzero_starts() {
        assert!(ProductEnsemble::new(vec![path(&[0.0, 1.0]), path(&[0.0, 1.0, 2.0])]).is_err());
        assert!(ProductEnsemble::new(vec![path(&[1.0, 1.0])]).is_err());
        assert!(ProductEnsemble::new(vec![]).is_err());
    }

    #[test]
    fn first_entrance_examples() {
        let e = ProductEnsemble::new(vec![path(&[0.0, 0.5, 1.2, 0.3])]).unwrap();
        assert_eq!(first_entrance_time(&e, 1.0), Some(2.0));
        assert_eq!(first_entrance_time(&e, 5.0), None);
    }

    #[test]
    fn last_sign_change_examples() {
        assert_eq!(
            last_sign_change(&path(&[0.0, 1.0, -1.0, 2.0]), 3.0).unwrap(),
            3.0
        );
        assert_eq!(
            last_sign_change(&path(&[0.0, 1.0, 2.0, 3.0]), 3.0).unwrap(),
            0.0
        );
        assert_eq!(
            last_sign_change(&path(&[0.0, 1.0, -1.0, 2.0]), 2.0).unwrap(),
            2.0
        );
        assert_eq!(
            last_sign_change(&path(&[0.0, 1.0, 0.0, 2.0]), 3.0).unwrap(),
            2.0
        );
        assert!(last_sign_change(&path(&[0.0, 1.0]), 2.0).is_err());
    }

    #[test]
    fn first_passage_examples() {
        let p = path(&[1.0, 0.5, -0.2, 0.4]);
        assert_eq!(first_passage_nonpositive(&p).unwrap(), Some(2.0));
        assert_eq!(
            first_passage_nonpositive(&path(&[1.0, 2.0, 3.0])).unwrap(),
            None
        );
        assert!(first_passage_nonpositive(&path(&[0.0, 2.0])).is_err());
        assert!(first_passage_nonpositive(&path(&[-1.0, 2.0])).is_err());
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_time(&path(&[0.0, 2.0, 1.0, 3.0]), 2.0).unwrap(), 1.0);
        assert_eq!(
            argmax_time(&path(&[0.0, -1.0, -2.0, -3.0]), 3.0).unwrap(),
            0.0
        );
        // ties go to the first index
        assert_eq!(argmax_time(&path(&[0.0, 2.0, 2.0]), 2.0).unwrap(), 1.0);
    }

    #[test]
    fn simulate_rejects_bad_grids() {
        let mut s = substream(1, 0);
        let a = StabilityIndex::CAUCHY;
        assert!(simulate_path(&mut s, a, 0.0, 1.0, 0).is_err());
        assert!(simulate_path(&mut s, a, 0.0, 0.0, 4).is_err());
        assert!(simulate_path(&mut s, a, 0.0, -1.0, 4).is_err());
        assert!(simulate_subordinated_path(&mut s, StabilityIndex::BROWNIAN, 1.0, 4).is_err());
    }

    #[test]
    fn simulated_paths_start_where_asked() {
        let mut s = substream(1, 0);
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let a = StabilityIndex::new(alpha).unwrap();
            let p = simulate_path(&mut s, a, 3.0, 1.0, 16).unwrap();
            assert_eq!(p.values()[0], 3.0);
            assert_eq!(p.values().len(), 17);
        }
        let p =
            simulate_subordinated_path(&mut s, StabilityIndex::new(1.2).unwrap(), 1.0, 16).unwrap();
        assert_eq!(p.values()[0], 0.0);
    }

    #[test]
    fn streaming_summary_matches_materialized_ensemble() {
        for n in 1..=4 {
            for alpha in [1.0, 1.5, 2.0] {
                let a = StabilityIndex::new(alpha).unwrap();
                let steps = 64;
                let e = ProductEnsemble::simulate(&mut substream(9, n as u64), a, n, 2.0, steps)
                    .unwrap();
                let inc = IncrementSampler::new(a, 2.0 / steps as f64);
                let mut buf = Vec::new();
                let s = summarize_ensemble(&mut substream(9, n as u64), &inc, n, steps, &mut buf);
                assert_eq!(s.sup_product, sup_product(&e));
                assert_eq!(s.terminal_product, e.product_at(steps));
                for (i, p) in e.paths().iter().enumerate() {
                    let m = p.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    assert_eq!(s.path_sups[i], m);
                }
            }
        }
    }
}
