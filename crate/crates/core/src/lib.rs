//! Simulation and closed-form oracles for the supremum of a product of
//! independent symmetric α-stable Lévy processes,
//!
//! ```text
//! S_n = sup_{0 ≤ u ≤ 1} Z_u^(1) · … · Z_u^(n),
//! ```
//!
//! its small-ball (persistence) behaviour `P(S_n ≤ ε)` and its large
//! deviations `P(S_n ≥ x)`, together with the auxiliary path functionals
//! (first passage below zero, last sign change, argmax) and stable bridges
//! that drive those asymptotics.
//!
//! All processes use the normalization `E[exp(iλZ_t)] = exp(-t|λ|^α)`,
//! including `α = 2` where `Z_1` has variance 2. See [`units`] for the
//! conversion to standard Brownian units.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod batch;
pub mod bridge;
pub mod error;
pub mod estimators;
pub mod ks;
pub mod paths;
pub mod rng;
pub mod units;

/// Crate version, embedded in CLI output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use batch::Workers;
pub use error::{Error, Result};
pub use rng::{RandomStream, StabilityIndex};
