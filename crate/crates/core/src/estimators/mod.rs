//! Monte Carlo estimation of persistence and tail probabilities, and
//! regression extraction of their exponents.

pub mod bernoulli;
pub mod fit;
pub mod moments;
pub mod monte_carlo;

pub use bernoulli::{wilson_interval, BernoulliEstimate, DEFAULT_Z};
pub use fit::{fit_exponent, weighted_least_squares, ExponentFit};
pub use moments::{mellin_moment_mc, pareto_product_tail_mc, MeanEstimate};
pub use monte_carlo::{
    empirical_cdf, estimate, estimate_persistence, estimate_sup_curves, estimate_survival,
    estimate_upper_tail, fit_density_slope, refine_curve, refinement_report, refinement_reports,
    require_nonzero, sample_last_sign_changes, sandwich_check, Curve, DensityBin, DensitySlope,
    Functional, PathConfig, RefinementReport, SandwichReport, SimConfig,
};
