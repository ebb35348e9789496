//! Observation-time machinery: grid generators, previous/next-tick lookups,
//! refresh times, the grid functionals and the jump-neighborhood interval
//! statistics.

mod functionals;
mod grid;
mod intervals;
mod refresh;

pub use functionals::{grid_functionals, grid_functionals_scaled, univariate_g, GridFunctionals};
pub use grid::{mesh, tau_bounds, MonotoneMap, PlanKind, SamplingPlan, TauBounds, TimeGrid};
pub use intervals::{collides_with_grid, jump_interval_stats, IntervalStats};
pub use refresh::{refresh_grid, RefreshGrid};
