//! Quadratic-(co)variation estimators and asymptotic-variance evaluators.

mod avar;
mod hy;

pub use avar::{
    avar_continuous, avar_cojump, poisson_functional_limits, poisson_functional_limits_refresh,
    poisson_interval_cdf, poisson_interval_moments, univariate_avar, AvarBreakdown,
    FunctionalLimits,
};
pub use hy::{hy, hy_brute, hy_rep, rv, EstimateResult, Representation};
