//! Closed forms and asymptotic shapes used as oracles and fitting targets.
//!
//! Every Brownian formula here is stated for *standard* Brownian motion
//! (variance `t`); see [`crate::units`].

pub mod quadrature;

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::StabilityIndex;

pub const QUAD_TOLERANCE: f64 = 1e-9;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `P(sup_{[0,1]} W ≤ ε) = 2Φ(ε) - 1` for standard Brownian motion.
pub fn brownian_sup_cdf(eps: f64) -> f64 {
    if eps <= 0.0 {
        0.0
    } else {
        libm::erf(eps / SQRT_2)
    }
}

/// `E[∏_{i=1}^n |N_i|^ν]` for i.i.d. standard normals,
/// `(2^ν/π)^{n/2} Γ((1+ν)/2)^n`.
pub fn mellin_abs_normal_product(nu: f64, n: u32) -> Result<f64> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", format!("{nu} must exceed -1")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let single = 2f64.powf(nu / 2.0) * libm::tgamma((1.0 + nu) / 2.0) / PI.sqrt();
    Ok(single.powi(n as i32))
}

fn abs_normal_tail(x: f64) -> f64 {
    libm::erfc(x / SQRT_2)
}

// φ(10) ≈ 7.7e-23: truncating the outer normal integral there is far below
// the quadrature tolerance.
const NORMAL_CUTOFF: f64 = 10.0;

fn product_tail(x: f64, n: u32, tol: f64) -> Result<f64> {
    if n == 1 {
        return Ok(abs_normal_tail(x));
    }
    // P(|N| · P_{n-1} ≥ x) = 2 ∫_0^∞ φ(y) P(P_{n-1} ≥ x/y) dy
    let inner_tol = tol * 1e-2;
    let failure = std::cell::Cell::new(None);
    let density = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let phi = (-0.5 * y * y).exp() * (2.0 / PI).sqrt();
        match product_tail(x / y, n - 1, inner_tol) {
            Ok(p) => phi * p,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let value = quadrature::integrate(density, 0.0, NORMAL_CUTOFF, tol, 400)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `P(∏_{i=1}^n |N_i| ≥ x)` for i.i.d. standard normals, `n ≤ 4`, by
/// nested adaptive quadrature to absolute tolerance `1e-9`.
pub fn brownian_product_tail_oracle(x: f64, n: u32) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("{x} is not positive")));
    }
    if !(1..=4).contains(&n) {
        return Err(Error::invalid("n", format!("{n} is outside 1..=4")));
    }
    product_tail(x, n, QUAD_TOLERANCE)
}

/// Tail shape `x^p (ln x)^q exp(-c x^e)`, evaluated for `x > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailAsymptote {
    pub power_of_x: f64,
    pub power_of_log: i32,
    /// `(c, e)` of the Gaussian factor `exp(-c x^e)`.
    pub gaussian_rate: Option<(f64, f64)>,
}

impl TailAsymptote {
    /// Brownian large-deviation shape `x^{-1/n} exp(-(n/2) x^{2/n})`.
    pub fn gaussian(n: u32) -> Self {
        let nf = n as f64;
        TailAsymptote {
            power_of_x: -1.0 / nf,
            power_of_log: 0,
            gaussian_rate: Some((nf / 2.0, 2.0 / nf)),
        }
    }

    /// Stable large-deviation shape `(ln x)^{n-1} x^{-α}`.
    pub fn stable(n: u32, alpha: StabilityIndex) -> Self {
        TailAsymptote {
            power_of_x: -alpha.value(),
            power_of_log: n as i32 - 1,
            gaussian_rate: None,
        }
    }

    pub fn for_process(n: u32, alpha: StabilityIndex) -> Self {
        if alpha.is_brownian() {
            Self::gaussian(n)
        } else {
            Self::stable(n, alpha)
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 1.0) || !x.is_finite() {
            return Err(Error::invalid(
                "x",
                format!("tail shapes need x > 1, got {x}"),
            ));
        }
        let mut log_value = self.power_of_x * x.ln() + self.power_of_log as f64 * x.ln().ln();
        if let Some((c, e)) = self.gaussian_rate {
            log_value -= c * x.powf(e);
        }
        Ok(log_value.exp())
    }
}

pub fn gaussian_large_dev_shape(x: f64, n: u32) -> Result<f64> {
    TailAsymptote::gaussian(n).eval(x)
}

pub fn stable_large_dev_shape(x: f64, n: u32, alpha: StabilityIndex) -> Result<f64> {
    TailAsymptote::stable(n, alpha).eval(x)
}

/// `P(XY ≥ z)` for i.i.d. Pareto `X, Y` with `P(X ≥ t) = t^{-ν}`, `t ≥ 1`:
/// `z^{-ν}(1 + ν ln z)`.
pub fn pareto_product_tail(z: f64, nu: f64) -> Result<f64> {
    if !(z >= 1.0) || !z.is_finite() {
        return Err(Error::invalid("z", format!("{z} is below 1")));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid("nu", format!("{nu} is not positive")));
    }
    Ok(z.powf(-nu) * (1.0 + nu * z.ln()))
}

/// Arcsine law `(2/π) arcsin √r`.
pub fn arcsine_cdf(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::invalid("r", format!("{r} is outside [0, 1]")));
    }
    Ok(2.0 / PI * r.sqrt().asin())
}

/// `P_1(T_0 ≥ t) = 2Φ(1/√t) - 1` for standard Brownian motion.
pub fn bm_survival_from_one(t: f64) -> Result<f64> {
    bm_survival(1.0, t)
}

/// `P_x(T_0 ≥ t) = 2Φ(x/√t) - 1` for standard Brownian motion started at `x > 0`.
pub fn bm_survival(start: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("t", format!("{t} is not positive")));
    }
    if !(start > 0.0) {
        return Err(Error::invalid("start", format!("{start} is not positive")));
    }
    Ok(libm::erf(start / (2.0 * t).sqrt()))
}

/// `-ζ(1/2)/√(2π)`: monitoring standard Brownian motion on a grid of mesh
/// `dt` behaves, to first order, like continuous monitoring of a barrier moved
/// away by `GRID_SHIFT · √dt`.
pub const GRID_SHIFT: f64 = 0.582_597_157_939_010_7;

/// Barrier shift for a grid of mesh `dt`, standard units.
pub fn grid_barrier_shift(dt: f64) -> f64 {
    GRID_SHIFT * dt.sqrt()
}
