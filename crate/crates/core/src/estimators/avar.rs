//! Asymptotic-variance evaluators for the limit laws of the estimators.
//!
//! All evaluators take limit quantities (functional derivatives, expected
//! interval statistics) as inputs rather than differencing realized sums;
//! the sampling module supplies realized functionals, and the Poisson helpers
//! here supply the closed-form limits.

use crate::error::{Error, Result};
use crate::sampling::IntervalStats;

/// Split of an asymptotic variance into its continuous and jump parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvarBreakdown {
    pub continuous: f64,
    pub jump: f64,
    pub total: f64,
}

impl AvarBreakdown {
    pub fn new(continuous: f64, jump: f64) -> Self {
        Self {
            continuous,
            jump,
            total: continuous + jump,
        }
    }
}

/// Limits of the three bivariate grid functionals under one normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalLimits {
    pub g: f64,
    pub f: f64,
    pub h: f64,
}

/// Continuous-part asymptotic variance with constant coefficients:
/// t·[G′(σ₁σ₂)²(1+ρ²) + F′(σ₁σ₂)² + 2H′(ρσ₁σ₂)²].
///
/// The result lives in the same normalization as the supplied derivatives.
pub fn avar_continuous(
    vol1: f64,
    vol2: f64,
    rho: f64,
    gp: f64,
    fp: f64,
    hp: f64,
    t: f64,
) -> Result<f64> {
    if gp < 0.0 || fp < 0.0 || hp < 0.0 || vol1 < 0.0 || vol2 < 0.0 || t < 0.0 {
        return Err(Error::Estimator("variance inputs must be nonnegative".into()));
    }
    let ss = vol1 * vol2;
    Ok(t * (gp * ss * ss * (1.0 + rho * rho) + fp * ss * ss + 2.0 * hp * (rho * ss) * (rho * ss)))
}

/// Conditional variance contributed by one jump with the given interval
/// statistics:
/// ΔX₁²σ₂²(R¹+L¹+R³+L³) + ΔX₂²σ₁²(R¹+L¹+R²+L²) + 2ρσ₁σ₂ΔX₁ΔX₂(R¹+L¹).
///
/// For an idiosyncratic jump one factor vanishes and the correlation term
/// drops out.
pub fn avar_cojump(dx1: f64, dx2: f64, vol1: f64, vol2: f64, rho: f64, iv: &IntervalStats) -> f64 {
    dx1 * dx1 * vol2 * vol2 * iv.bracket1()
        + dx2 * dx2 * vol1 * vol1 * iv.bracket2()
        + 2.0 * rho * vol1 * vol2 * dx1 * dx2 * iv.r1l1
}

/// Joint limit CDF P(R¹ ≤ u₁, R² ≤ u₂, R³ ≤ u₃) of the rescaled forward
/// interval statistics under independent Poisson sampling with rates λ₁, λ₂;
/// the backward triple (L¹, L², L³) follows the same law.
pub fn poisson_interval_cdf(lambda1: f64, lambda2: f64, u1: f64, u2: f64, u3: f64) -> f64 {
    if u1 < 0.0 || u2 < 0.0 || u3 < 0.0 {
        return 0.0;
    }
    let s = lambda1 + lambda2;
    (1.0 - (-lambda1 * u1).exp())
        * (1.0 - (-lambda2 * u1).exp())
        * (1.0 - lambda1 / s * (-lambda1 * u2).exp() - lambda2 / s * (-lambda2 * u3).exp())
}

/// First moments of the limit law: E[R¹+L¹] = 2(1/λ₁ + 1/λ₂ − 1/(λ₁+λ₂)) and
/// E[R²] = E[R³] = E[L²] = E[L³] = 1/(λ₁+λ₂).
pub fn poisson_interval_moments(lambda1: f64, lambda2: f64) -> IntervalStats {
    let s = lambda1 + lambda2;
    let one_sided = 1.0 / lambda1 + 1.0 / lambda2 - 1.0 / s;
    IntervalStats {
        r1l1: 2.0 * one_sided,
        r2: 1.0 / s,
        l2: 1.0 / s,
        r3: 1.0 / s,
        l3: 1.0 / s,
    }
}

/// Limits of (G′, F′, H′) for independent Poisson sampling with equal rates λ
/// under the per-component index normalization (n = expected observation
/// count per component): (7/3, 5/3, 1/3)/λ. This is the normalization in
/// which the continuous asymptotic variance for unit volatilities is 4 + 3ρ²
/// at λ = 1.
pub fn poisson_functional_limits(lambda: f64) -> FunctionalLimits {
    FunctionalLimits {
        g: 7.0 / (3.0 * lambda),
        f: 5.0 / (3.0 * lambda),
        h: 1.0 / (3.0 * lambda),
    }
}

/// The same limits under refresh-count normalization, 2/3 of the
/// per-component values: (14/9, 10/9, 2/9)/λ.
pub fn poisson_functional_limits_refresh(lambda: f64) -> FunctionalLimits {
    let base = poisson_functional_limits(lambda);
    FunctionalLimits {
        g: base.g * 2.0 / 3.0,
        f: base.f * 2.0 / 3.0,
        h: base.h * 2.0 / 3.0,
    }
}

/// Univariate asymptotic variance of realized variance under irregular
/// sampling: 2σ⁴G′t + 4ΣΔX²σ²E[η], where E[η] is the mean rescaled interval
/// length at each jump (e.g. E[Γ(2,λ)] = 2/λ for Poisson sampling).
pub fn univariate_avar(vol: f64, gp: f64, jumps: &[(f64, f64)], t: f64) -> f64 {
    let continuous = 2.0 * vol.powi(4) * gp * t;
    let jump: f64 = jumps
        .iter()
        .map(|&(dx, e_eta)| 4.0 * dx * dx * vol * vol * e_eta)
        .sum();
    continuous + jump
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_variance_matches_reference_constants() {
        // refresh-normalized constants: ρ = 0 gives 24/9, ρ = 1 gives 42/9
        let (gp, fp, hp) = (14.0 / 9.0, 10.0 / 9.0, 2.0 / 9.0);
        let v0 = avar_continuous(1.0, 1.0, 0.0, gp, fp, hp, 1.0).unwrap();
        assert!((v0 - 24.0 / 9.0).abs() < 1e-12);
        let v1 = avar_continuous(1.0, 1.0, 1.0, gp, fp, hp, 1.0).unwrap();
        assert!((v1 - 42.0 / 9.0).abs() < 1e-12);
        assert_eq!(avar_continuous(1.0, 1.0, 0.5, 0.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(avar_continuous(1.0, 1.0, 0.5, -1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn per_component_limits_give_table_normalization() {
        // 4 + 3ρ² for unit vols at λ = 1
        let lim = poisson_functional_limits(1.0);
        for rho in [0.0, 0.3, 0.8, 1.0] {
            let v = avar_continuous(1.0, 1.0, rho, lim.g, lim.f, lim.h, 1.0).unwrap();
            assert!((v - (4.0 + 3.0 * rho * rho)).abs() < 1e-12, "rho {rho}: {v}");
        }
        // and its refresh-normalized counterpart is 8/3 + 2ρ²
        let lr = poisson_functional_limits_refresh(1.0);
        let v = avar_continuous(1.0, 1.0, 1.0, lr.g, lr.f, lr.h, 1.0).unwrap();
        assert!((v - (8.0 / 3.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn cojump_variance_for_unit_poisson_is_eight_plus_six_rho() {
        let iv = poisson_interval_moments(1.0, 1.0);
        assert!((iv.r1l1 - 3.0).abs() < 1e-12);
        for rho in [0.0, 0.5, 1.0] {
            let v = avar_cojump(1.0, 1.0, 1.0, 1.0, rho, &iv);
            assert!((v - (8.0 + 6.0 * rho)).abs() < 1e-12, "rho {rho}: {v}");
        }
    }

    #[test]
    fn idiosyncratic_jump_drops_the_correlation_term() {
        let iv = poisson_interval_moments(1.0, 1.0);
        let v_low = avar_cojump(1.5, 0.0, 1.0, 2.0, -0.9, &iv);
        let v_high = avar_cojump(1.5, 0.0, 1.0, 2.0, 0.9, &iv);
        assert_eq!(v_low, v_high);
        assert!((v_low - 1.5 * 1.5 * 4.0 * 4.0).abs() < 1e-12);
        let zero = IntervalStats { r1l1: 0.0, r2: 0.0, l2: 0.0, r3: 0.0, l3: 0.0 };
        assert_eq!(avar_cojump(1.0, 1.0, 1.0, 1.0, 0.7, &zero), 0.0);
    }

    #[test]
    fn cojump_variance_is_component_swap_invariant() {
        let iv = IntervalStats { r1l1: 2.0, r2: 0.4, l2: 0.1, r3: 0.7, l3: 0.2 };
        let swapped = IntervalStats { r1l1: 2.0, r2: 0.7, l2: 0.2, r3: 0.4, l3: 0.1 };
        let a = avar_cojump(1.3, -0.8, 0.9, 1.7, 0.35, &iv);
        let b = avar_cojump(-0.8, 1.3, 1.7, 0.9, 0.35, &swapped);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn interval_cdf_limits_and_marginals() {
        let inf = f64::INFINITY;
        assert_eq!(poisson_interval_cdf(1.0, 1.0, inf, inf, inf), 1.0);
        let marginal = poisson_interval_cdf(1.0, 1.0, 1.0, inf, inf);
        let expected = (1.0 - (-1.0f64).exp()).powi(2);
        assert!((marginal - expected).abs() < 1e-12);
        assert_eq!(poisson_interval_cdf(1.0, 1.0, -0.1, inf, inf), 0.0);
    }

    #[test]
    fn interval_moments_match_quadrature_of_the_cdf() {
        // E[R¹] = ∫ (1 − P(R¹ ≤ u)) du computed numerically from the CDF
        let (l1, l2) = (1.3, 0.6);
        let inf = f64::INFINITY;
        let steps = 400_000;
        let hi = 60.0;
        let h = hi / steps as f64;
        let mut e_r1 = 0.0;
        for i in 0..steps {
            let u = (i as f64 + 0.5) * h;
            e_r1 += (1.0 - poisson_interval_cdf(l1, l2, u, inf, inf)) * h;
        }
        let closed = 1.0 / l1 + 1.0 / l2 - 1.0 / (l1 + l2);
        assert!((e_r1 - closed).abs() < 1e-4, "{e_r1} vs {closed}");
        assert!((poisson_interval_moments(l1, l2).r1l1 - 2.0 * closed).abs() < 1e-12);

        // E[R²] from the CDF marginal in u₂
        let mut e_r2 = 0.0;
        for i in 0..steps {
            let u = (i as f64 + 0.5) * h;
            e_r2 += (1.0 - poisson_interval_cdf(l1, l2, inf, u, inf)) * h;
        }
        assert!((e_r2 - 1.0 / (l1 + l2)).abs() < 1e-4, "{e_r2}");
    }

    #[test]
    fn univariate_variance_reference_points() {
        // regular grid, no jumps: 2σ⁴
        assert_eq!(univariate_avar(1.0, 1.0, &[], 1.0), 2.0);
        // Poisson λ=1: G′ = 2, one unit jump with E[Γ(2,1)] = 2: 4 + 8
        assert_eq!(univariate_avar(1.0, 2.0, &[(1.0, 2.0)], 1.0), 12.0);
        // alternating scheme: G′ = 1 + α², E[η] = 1 + α²
        let alpha: f64 = 0.4;
        let g = 1.0 + alpha * alpha;
        let v = univariate_avar(1.0, g, &[(1.0, g)], 1.0);
        assert!((v - (2.0 * g + 4.0 * g)).abs() < 1e-12);
    }

    #[test]
    fn breakdown_totals_add_up() {
        let b = AvarBreakdown::new(2.5, 8.0);
        assert_eq!(b.total, 10.5);
    }
}
