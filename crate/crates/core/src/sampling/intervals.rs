//! The five interval statistics around a time point that determine one jump's
//! contribution to the estimator variance: the straddling interval R¹+L¹ and
//! the forward/backward double-interpolation excesses R², R³, L², L³.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{tau_bounds, TimeGrid};

/// Unscaled interval statistics (time units); callers multiply by n for the
/// rescaled quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalStats {
    /// (R¹+L¹)(s): from the earlier previous tick to the later next tick.
    pub r1l1: f64,
    /// R²(s): forward excess of grid 1 beyond the later next tick.
    pub r2: f64,
    /// L²(s): backward excess of grid 1 before the earlier previous tick.
    pub l2: f64,
    /// R³(s): forward excess of grid 2 beyond the later next tick.
    pub r3: f64,
    /// L³(s): backward excess of grid 2 before the earlier previous tick.
    pub l3: f64,
}

impl IntervalStats {
    /// Bracket length multiplying a jump of component 1: (R¹+L¹) + R³ + L³.
    pub fn bracket1(&self) -> f64 {
        self.r1l1 + self.r3 + self.l3
    }

    /// Bracket length multiplying a jump of component 2: (R¹+L¹) + R² + L².
    pub fn bracket2(&self) -> f64 {
        self.r1l1 + self.r2 + self.l2
    }
}

/// True when `s` coincides exactly with an observation time of either grid.
pub fn collides_with_grid(s: f64, g1: &TimeGrid, g2: &TimeGrid) -> bool {
    let on = |g: &TimeGrid| g.times().binary_search_by(|x| x.total_cmp(&s)).is_ok();
    on(g1) || on(g2)
}

/// Evaluates the five statistics at an interior point `s`.
///
/// A point colliding exactly with an observation time is perturbed by
/// +10⁻¹² first (the quantities presuppose s interior to an interval); use
/// [`collides_with_grid`] to detect and record such collisions.
pub fn jump_interval_stats(s: f64, g1: &TimeGrid, g2: &TimeGrid) -> Result<IntervalStats> {
    let span_hi = g1.last().min(g2.last());
    if !(s > 0.0 && s < span_hi) {
        return Err(Error::OutOfSpan { t: s, lo: 0.0, hi: span_hi });
    }
    let s = if collides_with_grid(s, g1, g2) { s + 1e-12 } else { s };

    let b1 = tau_bounds(g1, s)?;
    let b2 = tau_bounds(g2, s)?;
    let plus_max = b1.tau_plus.max(b2.tau_plus);
    let minus_min = b1.tau_minus.min(b2.tau_minus);

    // double interpolations; out-of-span lookups surface as errors
    let tau_pp_12 = tau_bounds(g1, b2.tau_plus)?.tau_plus; // τ₊⁽¹⁾(τ₊⁽²⁾(s))
    let tau_pp_21 = tau_bounds(g2, b1.tau_plus)?.tau_plus; // τ₊⁽²⁾(τ₊⁽¹⁾(s))
    let tau_mm_12 = tau_bounds(g1, b2.tau_minus)?.tau_minus; // τ₋⁽¹⁾(τ₋⁽²⁾(s))
    let tau_mm_21 = tau_bounds(g2, b1.tau_minus)?.tau_minus; // τ₋⁽²⁾(τ₋⁽¹⁾(s))

    Ok(IntervalStats {
        r1l1: plus_max - minus_min,
        r2: tau_pp_12 - plus_max,
        r3: tau_pp_21 - plus_max,
        l2: minus_min - tau_mm_12,
        l3: minus_min - tau_mm_21,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SamplingPlan;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(ts: &[f64]) -> TimeGrid {
        TimeGrid::new(ts.to_vec(), ts.len().max(2)).unwrap()
    }

    #[test]
    fn matches_hand_evaluation() {
        let g1 = grid(&[0.0, 0.2, 0.5, 1.0]);
        let g2 = grid(&[0.0, 0.3, 0.6, 1.0]);
        let iv = jump_interval_stats(0.4, &g1, &g2).unwrap();
        assert!((iv.r1l1 - 0.4).abs() < 1e-12);
        assert!((iv.r2 - 0.4).abs() < 1e-12);
        assert_eq!(iv.r3, 0.0);
        assert_eq!(iv.l2, 0.0);
        assert!((iv.l3 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn synchronous_grids_have_no_excess() {
        let g = grid(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let iv = jump_interval_stats(0.6, &g, &g).unwrap();
        assert_eq!((iv.r2, iv.r3, iv.l2, iv.l3), (0.0, 0.0, 0.0, 0.0));
        assert!((iv.r1l1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rejects_boundary_points() {
        let g = grid(&[0.0, 0.5, 1.0]);
        assert!(jump_interval_stats(0.0, &g, &g).is_err());
        assert!(jump_interval_stats(1.0, &g, &g).is_err());
    }

    #[test]
    fn collision_is_detected_and_perturbed() {
        let g1 = grid(&[0.0, 0.2, 0.5, 1.0]);
        let g2 = grid(&[0.0, 0.3, 0.6, 1.0]);
        assert!(collides_with_grid(0.5, &g1, &g2));
        assert!(!collides_with_grid(0.4, &g1, &g2));
        // at s = 0.5 + ε the straddle runs from τ₋²(s) = 0.3 to τ₊¹(s) = 1.0
        let iv = jump_interval_stats(0.5, &g1, &g2).unwrap();
        assert!((iv.r1l1 - 0.7).abs() < 1e-9, "r1l1 = {}", iv.r1l1);
    }

    #[test]
    fn forward_backward_products_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let g1 = SamplingPlan::poisson(200, 1.0, 1000 + trial).generate().unwrap();
            let g2 = SamplingPlan::poisson(200, 1.0, 2000 + trial).generate().unwrap();
            let hi = g1.last().min(g2.last());
            let s: f64 = rng.random_range(0.05..hi - 0.05);
            let iv = jump_interval_stats(s, &g1, &g2).unwrap();
            assert!(iv.r2 * iv.r3 == 0.0, "both forward excesses nonzero at {s}");
            assert!(iv.l2 * iv.l3 == 0.0, "both backward excesses nonzero at {s}");
            for v in [iv.r1l1, iv.r2, iv.r3, iv.l2, iv.l3] {
                assert!(v >= 0.0);
            }
        }
    }

    #[test]
    fn poisson_means_match_the_limit_law() {
        // E[n(R¹+L¹)] → 3 and E[nR²] → 1/2 for λ₁ = λ₂ = 1
        let n = 5_000;
        let draws = 4_000;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut m_r1l1, mut m_r2) = (0.0, 0.0);
        for trial in 0..draws {
            let g1 = SamplingPlan::poisson(n, 1.0, 50_000 + trial).generate().unwrap();
            let g2 = SamplingPlan::poisson(n, 1.0, 90_000 + trial).generate().unwrap();
            let s: f64 = rng.random_range(0.2..0.8);
            let iv = jump_interval_stats(s, &g1, &g2).unwrap();
            m_r1l1 += n as f64 * iv.r1l1;
            m_r2 += n as f64 * iv.r2;
        }
        m_r1l1 /= draws as f64;
        m_r2 /= draws as f64;
        assert!((m_r1l1 - 3.0).abs() < 0.1, "E[n(R1+L1)] = {m_r1l1}");
        assert!((m_r2 - 0.5).abs() < 0.05, "E[nR2] = {m_r2}");
    }
}
