//! Weighted log-log regression for power laws with an optional
//! `ln|ln s|` correction.

use serde::Serialize;

use super::bernoulli::BernoulliEstimate;
use crate::error::{Error, Result};

/// Solution of a weighted least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsSolution {
    pub coef: Vec<f64>,
    /// `(XᵀWX)^{-1}`, the covariance when weights are inverse variances.
    pub covariance: Vec<Vec<f64>>,
    pub r_squared: f64,
}

/// Minimizes `Σ w_i (y_i - x_iᵀβ)²` by Householder QR of `√W X`.
///
/// `rows[i]` is the design row `x_i`. Rejects rank-deficient designs.
pub fn weighted_least_squares(rows: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<WlsSolution> {
    let m = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if m != y.len() || m != w.len() || p == 0 || rows.iter().any(|r| r.len() != p) {
        return Err(Error::DegenerateDesign("inconsistent dimensions".into()));
    }
    if m < p {
        return Err(Error::DegenerateDesign(format!(
            "{m} points for {p} parameters"
        )));
    }
    if w.iter().any(|&wi| !(wi > 0.0) || !wi.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateDesign("non-finite data or weight".into()));
    }

    // column-major copy of √W X, and √W y
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..m).map(|i| rows[i][j] * sw[i]).collect())
        .collect();
    let mut b: Vec<f64> = y.iter().zip(&sw).map(|(v, s)| v * s).collect();
    let col_norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    for j in 0..p {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-10 * col_norms[j].max(f64::MIN_POSITIVE)) {
            return Err(Error::DegenerateDesign(format!(
                "column {j} is collinear with earlier columns"
            )));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j) {
                let dot: f64 = v.iter().zip(&col[j..]).map(|(x, y)| x * y).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[j..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&b[j..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in b[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }

    // back substitution on R (upper triangle of a, column-major)
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|k| a[k][i] * coef[k]).sum();
        coef[i] = (b[i] - s) / a[i][i];
    }

    // R^{-1}, then covariance = R^{-1} R^{-T}
    let mut rinv = vec![vec![0.0; p]; p];
    for i in 0..p {
        rinv[i][i] = 1.0 / a[i][i];
        for j in (i + 1)..p {
            let s: f64 = (i..j).map(|k| rinv[i][k] * a[j][k]).sum();
            rinv[i][j] = -s / a[j][j];
        }
    }
    let covariance: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| (0..p).map(|k| rinv[i][k] * rinv[j][k]).sum())
                .collect()
        })
        .collect();

    let wsum: f64 = w.iter().sum();
    let ybar: f64 = w.iter().zip(y).map(|(wi, yi)| wi * yi).sum::<f64>() / wsum;
    let sst: f64 = w
        .iter()
        .zip(y)
        .map(|(wi, yi)| wi * (yi - ybar).powi(2))
        .sum();
    let ssr: f64 = rows
        .iter()
        .zip(y)
        .zip(w)
        .map(|((r, yi), wi)| {
            let fit: f64 = r.iter().zip(&coef).map(|(x, c)| x * c).sum();
            wi * (yi - fit).powi(2)
        })
        .sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(WlsSolution {
        coef,
        covariance,
        r_squared,
    })
}

/// Fitted `ln p ≈ intercept + theta · ln s (+ beta · ln|ln s|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub theta: f64,
    /// 0 when the log term was not fitted.
    pub beta: f64,
    pub intercept: f64,
    pub stderr_theta: f64,
    pub stderr_beta: f64,
    pub r_squared: f64,
    pub include_log_term: bool,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 4;

/// Delta-method variance of `ln p̂`, `(1-p)/(np)`, with one pseudo-failure
/// added so that `p̂ = 1` keeps a finite weight.
fn log_p_variance(e: &BernoulliEstimate) -> f64 {
    (e.trials - e.successes + 1) as f64 / (e.trials as f64 * e.successes as f64)
}

/// Weighted regression of `ln p̂` on `ln scale` (and optionally
/// `ln|ln scale|`), weights `1/Var(ln p̂)`.
pub fn fit_exponent(
    points: &[(f64, BernoulliEstimate)],
    include_log_term: bool,
) -> Result<ExponentFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateDesign(format!(
            "{} points; at least {MIN_FIT_POINTS} are required",
            points.len()
        )));
    }
    for (s, e) in points {
        if e.successes == 0 {
            return Err(Error::ZeroCount {
                threshold: *s,
                trials: e.trials,
            });
        }
        if !(*s > 0.0) || !s.is_finite() {
            return Err(Error::invalid("scale", format!("{s} is not positive")));
        }
        if include_log_term && *s == 1.0 {
            return Err(Error::invalid("scale", "ln|ln s| is undefined at s = 1"));
        }
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|(s, _)| {
            let l = s.ln();
            if include_log_term {
                vec![1.0, l, l.abs().ln()]
            } else {
                vec![1.0, l]
            }
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|(_, e)| e.p_hat.ln()).collect();
    let w: Vec<f64> = points
        .iter()
        .map(|(_, e)| 1.0 / log_p_variance(e))
        .collect();
    let sol = weighted_least_squares(&rows, &y, &w)?;
    Ok(ExponentFit {
        intercept: sol.coef[0],
        theta: sol.coef[1],
        beta: if include_log_term { sol.coef[2] } else { 0.0 },
        stderr_theta: sol.covariance[1][1].sqrt(),
        stderr_beta: if include_log_term {
            sol.covariance[2][2].sqrt()
        } else {
            0.0
        },
        r_squared: sol.r_squared,
        include_log_term,
        points: points.len(),
    })
}
