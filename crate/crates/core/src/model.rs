//! Bivariate constant-coefficient jump-diffusion model.
//!
//! The continuous part is driven by correlated Brownian motions through the
//! lower-triangular square root of the spot covariance matrix
//! `[[σ₁², ρσ₁σ₂], [ρσ₁σ₂, σ₂²]]`; jumps are deterministic scenario inputs
//! (times and sizes), so the model's quadratic covariation is available in
//! closed form as a ground truth for the estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One jump event: both components jump at `time` by `(size1, size2)`.
/// An idiosyncratic jump has exactly one nonzero size; a co-jump has both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub size1: f64,
    pub size2: f64,
}

impl Jump {
    pub fn is_cojump(&self) -> bool {
        self.size1 != 0.0 && self.size2 != 0.0
    }

    /// Contribution to the quadratic covariation: ΔX⁽¹⁾ΔX⁽²⁾.
    pub fn covariation(&self) -> f64 {
        self.size1 * self.size2
    }
}

/// The jump component of the model: a finite list of events, strictly
/// increasing in time and strictly inside (0, horizon).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JumpScenario {
    pub jumps: Vec<Jump>,
}

impl JumpScenario {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(mut jumps: Vec<Jump>) -> Self {
        jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
        Self { jumps }
    }

    pub fn times(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.time).collect()
    }

    fn validate(&self, horizon: f64) -> Result<()> {
        let mut prev = 0.0;
        for (i, j) in self.jumps.iter().enumerate() {
            if !(j.time > 0.0 && j.time < horizon) {
                return Err(Error::Model("jump time must be interior".into()));
            }
            if i > 0 && j.time <= prev {
                return Err(Error::Model(format!(
                    "jump times must be strictly increasing (index {i})"
                )));
            }
            if j.size1 == 0.0 && j.size2 == 0.0 {
                return Err(Error::Model(format!("jump {i} has zero size in both components")));
            }
            if !(j.size1.is_finite() && j.size2.is_finite()) {
                return Err(Error::Model(format!("jump {i} has non-finite size")));
            }
            prev = j.time;
        }
        Ok(())
    }
}

/// The three benchmark jump scenarios, plus an escape
/// hatch for caller-supplied jump lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioTag {
    /// One co-jump of size (1, 1).
    Sc1,
    /// One co-jump plus one idiosyncratic jump per component, all sizes 1.
    Sc2,
    /// One idiosyncratic jump per component, no co-jump.
    Sc3,
    Custom,
}

impl ScenarioTag {
    /// The fixed jump sizes of the scenario, in drawing order.
    pub fn sizes(&self) -> &'static [(f64, f64)] {
        match self {
            ScenarioTag::Sc1 => &[(1.0, 1.0)],
            ScenarioTag::Sc2 => &[(1.0, 1.0), (1.0, 0.0), (0.0, 1.0)],
            ScenarioTag::Sc3 => &[(1.0, 0.0), (0.0, 1.0)],
            ScenarioTag::Custom => &[],
        }
    }
}

impl std::str::FromStr for ScenarioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc1" => Ok(ScenarioTag::Sc1),
            "sc2" => Ok(ScenarioTag::Sc2),
            "sc3" => Ok(ScenarioTag::Sc3),
            "custom" => Ok(ScenarioTag::Custom),
            other => Err(Error::Config(format!("unknown scenario '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioTag::Sc1 => "sc1",
            ScenarioTag::Sc2 => "sc2",
            ScenarioTag::Sc3 => "sc3",
            ScenarioTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Coefficients and jump scenario of the bivariate semimartingale.
///
/// Immutable after validation; shareable across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Drift vector b = (b₁, b₂).
    pub drift: [f64; 2],
    /// σ⁽¹⁾ > 0.
    pub vol1: f64,
    /// σ⁽²⁾ > 0.
    pub vol2: f64,
    /// Correlation ρ ∈ [−1, 1].
    pub rho: f64,
    /// Time span (0, horizon], capped at 1.
    pub horizon: f64,
    pub jumps: JumpScenario,
}

impl ModelSpec {
    pub fn new(
        drift: [f64; 2],
        vol1: f64,
        vol2: f64,
        rho: f64,
        horizon: f64,
        jumps: JumpScenario,
    ) -> Result<Self> {
        let spec = Self {
            drift,
            vol1,
            vol2,
            rho,
            horizon,
            jumps,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The benchmark model: b = (0.1, 0.1), σ⁽¹⁾ = σ⁽²⁾ = 1,
    /// horizon 1, with the given correlation and jumps.
    pub fn benchmark(rho: f64, jumps: JumpScenario) -> Result<Self> {
        Self::new([0.1, 0.1], 1.0, 1.0, rho, 1.0, jumps)
    }

    /// Checks every invariant, reporting the first violation by name.
    pub fn validate(&self) -> Result<()> {
        if !(self.vol1 > 0.0 && self.vol1.is_finite()) {
            return Err(Error::Model("vol1 must be positive".into()));
        }
        if !(self.vol2 > 0.0 && self.vol2.is_finite()) {
            return Err(Error::Model("vol2 must be positive".into()));
        }
        if !(self.rho >= -1.0 && self.rho <= 1.0) {
            return Err(Error::Model("rho out of [-1,1]".into()));
        }
        if !(self.horizon > 0.0 && self.horizon <= 1.0) {
            return Err(Error::Model("horizon must lie in (0, 1]".into()));
        }
        if !(self.drift[0].is_finite() && self.drift[1].is_finite()) {
            return Err(Error::Model("drift must be finite".into()));
        }
        // Positive semi-definiteness of σσᵀ is automatic for |ρ| ≤ 1; assert anyway.
        let det = (self.vol1 * self.vol2).powi(2) * (1.0 - self.rho * self.rho);
        if det < -1e-12 {
            return Err(Error::Model("spot covariance not positive semi-definite".into()));
        }
        self.jumps.validate(self.horizon)
    }

    /// Spot covariance matrix σσᵀ.
    pub fn spot_covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * self.vol1 * self.vol2;
        [[self.vol1 * self.vol1, c], [c, self.vol2 * self.vol2]]
    }

    /// Ground-truth quadratic covariation [X⁽¹⁾, X⁽²⁾]_t: the integrated
    /// covolatility ρσ⁽¹⁾σ⁽²⁾t plus the sum of co-jump products up to t.
    pub fn theoretical_qcov(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::OutOfSpan {
                t,
                lo: 0.0,
                hi: self.horizon,
            });
        }
        let continuous = self.rho * self.vol1 * self.vol2 * t;
        let jumps: f64 = self
            .jumps
            .jumps
            .iter()
            .filter(|j| j.time <= t)
            .map(Jump::covariation)
            .sum();
        Ok(continuous + jumps)
    }
}
