//! Observation-time grids and their generators.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A realized observation-time grid on [0, 1]: strictly increasing, starting
/// at 0, together with the nominal asymptotic index n the grid was generated
/// at. CLT scalings use the nominal index, not the realized count.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    n_nominal: usize,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>, n_nominal: usize) -> Result<Self> {
        if times.is_empty() || times[0] != 0.0 {
            return Err(Error::DegenerateGrid("grid must start at 0".into()));
        }
        if n_nominal == 0 {
            return Err(Error::DegenerateGrid("nominal index must be positive".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::DegenerateGrid("times must be finite".into()));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::DegenerateGrid(format!(
                    "times not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        if *times.last().unwrap() > 1.0 {
            return Err(Error::DegenerateGrid("times must lie in [0, 1]".into()));
        }
        Ok(Self { times, n_nominal })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false: a valid grid contains at least t = 0.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_nominal(&self) -> usize {
        self.n_nominal
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the last observation ≤ t (`m₋(t)`), if any.
    pub fn m_minus(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&x| x <= t);
        k.checked_sub(1)
    }

    /// Index of the first observation ≥ t (`m₊(t)`), if any.
    pub fn m_plus(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&x| x < t);
        (k < self.times.len()).then_some(k)
    }

    /// Writes the grid in the two-column debug format `index time`, one
    /// observation per line. Times use the shortest representation that
    /// round-trips binary64 exactly.
    pub fn write_two_column<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (i, t) in self.times.iter().enumerate() {
            writeln!(w, "{i} {t}")?;
        }
        Ok(())
    }

    /// Reads a grid written by [`TimeGrid::write_two_column`].
    pub fn read_two_column<R: BufRead>(r: R, n_nominal: usize) -> Result<Self> {
        let mut times = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let _idx = parts
                .next()
                .ok_or_else(|| Error::Config("malformed grid line".into()))?;
            let t: f64 = parts
                .next()
                .ok_or_else(|| Error::Config("grid line missing time column".into()))?
                .parse()
                .map_err(|e| Error::Config(format!("bad time value: {e}")))?;
            times.push(t);
        }
        TimeGrid::new(times, n_nominal)
    }
}

/// Maximum gap between successive observations (the mesh π_n).
pub fn mesh(grid: &TimeGrid) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::DegenerateGrid("mesh needs at least two observations".into()));
    }
    Ok(grid
        .times()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max))
}

/// Previous/next-tick lookup around a time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauBounds {
    /// τ₋(s): largest grid time ≤ s.
    pub tau_minus: f64,
    /// τ₊(s): smallest grid time ≥ s.
    pub tau_plus: f64,
    /// Index of τ₋(s).
    pub m_minus: usize,
    /// Index of τ₊(s).
    pub m_plus: usize,
}

/// Bracketing observations around `s`; on a grid point both sides coincide.
pub fn tau_bounds(grid: &TimeGrid, s: f64) -> Result<TauBounds> {
    if !(s >= grid.first() && s <= grid.last()) {
        return Err(Error::OutOfSpan {
            t: s,
            lo: grid.first(),
            hi: grid.last(),
        });
    }
    let m_minus = grid.m_minus(s).expect("s >= first");
    let m_plus = grid.m_plus(s).expect("s <= last");
    Ok(TauBounds {
        tau_minus: grid.times()[m_minus],
        tau_plus: grid.times()[m_plus],
        m_minus,
        m_plus,
    })
}

/// A strictly isotonic map of [0, 1] onto itself, identified by name so that
/// plans stay serializable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneMap {
    Identity,
    /// f(x) = x^p with p > 0; p = 2 is the classic slow-start design.
    Power(f64),
}

impl MonotoneMap {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MonotoneMap::Identity => x,
            MonotoneMap::Power(p) => x.powf(*p),
        }
    }

    /// ∫₀¹ f′(x)² dx, the limit of the rescaled squared-gap sum for the
    /// transformed scheme.
    pub fn squared_derivative_integral(&self) -> f64 {
        match self {
            MonotoneMap::Identity => 1.0,
            // ∫ (p x^{p-1})² dx = p² / (2p − 1), finite for p > 1/2
            MonotoneMap::Power(p) => p * p / (2.0 * p - 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if let MonotoneMap::Power(p) = self {
            if !(*p > 0.0 && p.is_finite()) {
                return Err(Error::Plan("power map exponent must be positive".into()));
            }
        }
        Ok(())
    }
}

/// The generator family for a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "scheme")]
pub enum PlanKind {
    /// t_i = i/n.
    Regular,
    /// t_i = f(i/n) for a strictly isotonic deterministic f.
    Transformed { map: MonotoneMap },
    /// t_i = i/n for even i, (i+α)/n for odd i, α ∈ (0, 1).
    Alternating { alpha: f64 },
    /// Arrival times of a Poisson process with intensity n·rate, truncated at 1.
    Poisson { rate: f64 },
}

impl PlanKind {
    pub fn is_random(&self) -> bool {
        matches!(self, PlanKind::Poisson { .. })
    }
}

/// A grid generator: the scheme, the asymptotic index n, and the RNG seed
/// (used by the Poisson scheme only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub kind: PlanKind,
    pub n: usize,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(kind: PlanKind, n: usize, seed: u64) -> Result<Self> {
        let plan = Self { kind, n, seed };
        plan.validate()?;
        Ok(plan)
    }

    pub fn regular(n: usize) -> Self {
        Self { kind: PlanKind::Regular, n, seed: 0 }
    }

    pub fn transformed(n: usize, map: MonotoneMap) -> Self {
        Self { kind: PlanKind::Transformed { map }, n, seed: 0 }
    }

    pub fn alternating(n: usize, alpha: f64) -> Self {
        Self { kind: PlanKind::Alternating { alpha }, n, seed: 0 }
    }

    pub fn poisson(n: usize, rate: f64, seed: u64) -> Self {
        Self { kind: PlanKind::Poisson { rate }, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Plan("n must be at least 2".into()));
        }
        match &self.kind {
            PlanKind::Regular => Ok(()),
            PlanKind::Transformed { map } => map.validate(),
            PlanKind::Alternating { alpha } => {
                if *alpha > 0.0 && *alpha < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Plan("alpha must lie in (0, 1)".into()))
                }
            }
            PlanKind::Poisson { rate } => {
                if *rate > 0.0 && rate.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Plan("rate must be positive".into()))
                }
            }
        }
    }

    /// Realizes the grid.
    ///
    /// Deterministic schemes always end at 1 (the terminal point is appended
    /// when the scheme does not produce it); the Poisson scheme is truncated
    /// at its last arrival ≤ 1, never padded, so truncation cannot create an
    /// artificial observation.
    pub fn generate(&self) -> Result<TimeGrid> {
        self.validate()?;
        let n = self.n;
        let times = match &self.kind {
            PlanKind::Regular => (0..=n).map(|i| i as f64 / n as f64).collect(),
            PlanKind::Transformed { map } => {
                (0..=n).map(|i| map.apply(i as f64 / n as f64)).collect()
            }
            PlanKind::Alternating { alpha } => {
                let mut times = Vec::with_capacity(n + 1);
                for i in 0..=n {
                    let t = if i % 2 == 0 {
                        i as f64 / n as f64
                    } else {
                        (i as f64 + alpha) / n as f64
                    };
                    if t <= 1.0 {
                        times.push(t);
                    }
                }
                times
            }
            PlanKind::Poisson { rate } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let exp = Exp::new(n as f64 * rate)
                    .map_err(|e| Error::Plan(format!("bad exponential rate: {e}")))?;
                let mut times = vec![0.0];
                let mut t = 0.0;
                loop {
                    t += exp.sample(&mut rng);
                    if t > 1.0 {
                        break;
                    }
                    times.push(t);
                }
                times
            }
        };
        let mut times = times;
        if !self.kind.is_random() && *times.last().unwrap() < 1.0 {
            times.push(1.0);
        }
        TimeGrid::new(times, n)
    }
}
