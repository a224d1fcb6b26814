//! Native versus standard-Brownian units.
//!
//! Simulation always runs in the native normalization `exp(-t|λ|^α)`. For
//! `α = 2` that is Brownian motion with variance `2t`; closed-form Brownian
//! oracles are stated for the standard one (variance `t`). A standard
//! coordinate `w` corresponds to the native coordinate `√2 · w`. For `α < 2`
//! both unit systems coincide.

use serde::Serialize;

use crate::rng::StabilityIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Native,
    Standard,
}

impl Units {
    /// Native value of one coordinate given in these units.
    pub fn coordinate_factor(self, alpha: StabilityIndex) -> f64 {
        match self {
            Units::Standard if alpha.is_brownian() => std::f64::consts::SQRT_2,
            _ => 1.0,
        }
    }

    pub fn to_native_position(self, alpha: StabilityIndex, x: f64) -> f64 {
        x * self.coordinate_factor(alpha)
    }

    /// Native threshold for a product of `n` coordinates.
    pub fn to_native_product(self, alpha: StabilityIndex, n: usize, x: f64) -> f64 {
        let c = self.coordinate_factor(alpha);
        // SQRT_2² rounds above 2, so square the factor exactly
        let square: f64 = if c == 1.0 { 1.0 } else { 2.0 };
        let even = square.powi((n / 2) as i32);
        if n % 2 == 1 {
            x * even * c
        } else {
            x * even
        }
    }

    pub fn from_native_position(self, alpha: StabilityIndex, x: f64) -> f64 {
        x / self.coordinate_factor(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_products_scale_by_powers_of_root_two() {
        let a = StabilityIndex::BROWNIAN;
        assert!((Units::Standard.to_native_product(a, 2, 1.5) - 3.0).abs() < 1e-15);
        assert_eq!(Units::Native.to_native_product(a, 2, 1.5), 1.5);
        let c = StabilityIndex::CAUCHY;
        assert_eq!(Units::Standard.to_native_product(c, 3, 1.5), 1.5);
    }
}
