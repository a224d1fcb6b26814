//! Two-sample Kolmogorov–Smirnov test.

use serde::Serialize;

use crate::error::{Error, Result};

/// `c(0.01) = sqrt(-ln(0.005) / 2)`.
pub fn ks_coefficient(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n1: usize,
    pub n2: usize,
    pub critical_1pct: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
    pub pass: bool,
}

fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn two_sample_ks(sample1: &[f64], sample2: &[f64]) -> Result<KsReport> {
    if sample1.is_empty() || sample2.is_empty() {
        return Err(Error::invalid("sample", "both samples must be nonempty"));
    }
    if sample1.iter().chain(sample2).any(|v| v.is_nan()) {
        return Err(Error::invalid("sample", "NaN in sample"));
    }
    let mut a = sample1.to_vec();
    let mut b = sample2.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let v = a[i].min(b[j]);
        while i < n1 && a[i] == v {
            i += 1;
        }
        while j < n2 && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let scale = ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt();
    let critical_1pct = ks_coefficient(0.01) * scale;
    let ne = 1.0 / (scale * scale);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsReport {
        statistic: d,
        n1,
        n2,
        critical_1pct,
        p_value: kolmogorov_survival(lambda),
        pass: d < critical_1pct,
    })
}
