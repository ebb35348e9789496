//! Paired Monte Carlo experiment: estimate the quadratic covariation with and
//! without jumps on common random numbers, decompose the variance into its
//! continuous and jump parts, and report them next to their theoretical
//! values.
//!
//! Per replicate the observation grids, the scenario jump times and the path
//! noise come from disjoint deterministic RNG substreams, replicates run in
//! parallel, and the aggregation is a fixed-order sequential reduction, so a
//! config reproduces its report bit for bit.

use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::estimators::{avar_cojump, avar_continuous, hy, poisson_functional_limits, poisson_interval_moments};
use crate::model::{JumpScenario, ModelSpec, ScenarioTag};
use crate::rng::{derive_seed, substream, Stream};
use crate::sampling::{refresh_grid, tau_bounds, PlanKind, SamplingPlan, TimeGrid};
use crate::simulate::{build_union_grid, draw_scenario_jumps_with, simulate_bivariate};
use crate::stats;

/// One experiment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub scenario: ScenarioTag,
    pub rho: f64,
    /// Nominal per-component observation count (the plan index n).
    pub expected_obs: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub sampling: PlanKind,
}

impl McConfig {
    pub fn new(scenario: ScenarioTag, rho: f64, expected_obs: usize, reps: usize, base_seed: u64) -> Self {
        Self {
            scenario,
            rho,
            expected_obs,
            reps,
            base_seed,
            sampling: PlanKind::Poisson { rate: 1.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(Error::Config("reps must be at least 2".into()));
        }
        if self.expected_obs < 100 {
            return Err(Error::Config("expected_obs must be at least 100".into()));
        }
        if !(self.rho >= -1.0 && self.rho <= 1.0) {
            return Err(Error::Config("rho out of [-1,1]".into()));
        }
        if self.scenario == ScenarioTag::Custom {
            return Err(Error::Config("monte carlo runs need a drawable scenario (sc1/sc2/sc3)".into()));
        }
        Ok(())
    }
}

/// Aggregated results of one configuration.
///
/// The canonical variance normalization multiplies by the nominal
/// per-component count n; the refresh-count normalization is reported
/// alongside, with the two related by the factor n / mean_refresh_count
/// (3/2 for equal unit rates).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub scenario: ScenarioTag,
    pub rho: f64,
    pub reps: usize,
    /// Nominal per-component count used in the canonical normalization.
    pub n: usize,
    pub mean_hy: f64,
    pub mean_hy_c: f64,
    /// n·(total variance − variance of the continuous-only estimate).
    pub nvar_hy_j: f64,
    /// n·variance of the continuous-only estimate.
    pub nvar_hy_c: f64,
    /// Standard error of mean_hy.
    pub se_mean: f64,
    pub theory_jump: Option<f64>,
    pub theory_continuous: Option<f64>,
    pub normalization: &'static str,
    pub mean_refresh_count: f64,
    /// The jump variance under refresh-count normalization.
    pub nvar_hy_j_refresh: f64,
    pub nvar_hy_c_refresh: f64,
    /// Total jump-time redraws across replicates, triggered by the boundary
    /// degeneracies of [`jumps_interact`].
    pub collision_redraws: u64,
}

/// True when the realized jump times are degenerate for the limit theory at
/// this grid resolution: either some jump falls beyond the last observation
/// of a component it moves (the estimator cannot see it — the truncation
/// effect near t), or two distinct jumps occupy overlapping observation
/// intervals across components, so that the estimator picks up their product.
/// Both are boundary events of probability O(1/n) per replicate that the
/// asymptotic variance targets do not model.
pub fn jumps_interact(jumps: &JumpScenario, g1: &TimeGrid, g2: &TimeGrid) -> bool {
    let interval = |g: &TimeGrid, s: f64| -> Option<(f64, f64)> {
        if s > g.last() {
            return None;
        }
        tau_bounds(g, s).ok().map(|b| (b.tau_minus, b.tau_plus))
    };
    for j in &jumps.jumps {
        if (j.size1 != 0.0 && j.time > g1.last()) || (j.size2 != 0.0 && j.time > g2.last()) {
            return true;
        }
    }
    for (ia, a) in jumps.jumps.iter().enumerate() {
        if a.size1 == 0.0 {
            continue;
        }
        let Some(i1) = interval(g1, a.time) else { continue };
        for (ib, b) in jumps.jumps.iter().enumerate() {
            if ia == ib || b.size2 == 0.0 {
                continue;
            }
            let Some(i2) = interval(g2, b.time) else { continue };
            if i1.1.min(i2.1) > i1.0.max(i2.0) {
                return true;
            }
        }
    }
    false
}

fn draw_separated_jumps<R: rand::Rng>(
    tag: ScenarioTag,
    rng: &mut R,
    g1: &TimeGrid,
    g2: &TimeGrid,
) -> Result<(JumpScenario, u64)> {
    let mut redraws = 0u64;
    loop {
        let jumps = draw_scenario_jumps_with(tag, rng)?;
        if !jumps_interact(&jumps, g1, g2) {
            return Ok((jumps, redraws));
        }
        redraws += 1;
        if redraws > 1000 {
            return Err(Error::Simulation("could not separate jump times".into()));
        }
    }
}

struct RepOutcome {
    hy_full: f64,
    hy_cont: f64,
    refresh_count: usize,
    redraws: u64,
}

fn run_replicate(cfg: &McConfig, rep: usize) -> Result<RepOutcome> {
    let g1 = SamplingPlan {
        kind: cfg.sampling,
        n: cfg.expected_obs,
        seed: derive_seed(cfg.base_seed, rep as u64, Stream::Grid1),
    }
    .generate()?;
    let g2 = SamplingPlan {
        kind: cfg.sampling,
        n: cfg.expected_obs,
        seed: derive_seed(cfg.base_seed, rep as u64, Stream::Grid2),
    }
    .generate()?;

    let mut jump_rng = substream(cfg.base_seed, rep as u64, Stream::JumpTimes);
    let (jumps, redraws) = draw_separated_jumps(cfg.scenario, &mut jump_rng, &g1, &g2)?;

    let union = build_union_grid(&g1, &g2, &jumps.times())?;
    let spec = ModelSpec::benchmark(cfg.rho, jumps)?;
    let sim = simulate_bivariate(&spec, &union, derive_seed(cfg.base_seed, rep as u64, Stream::Path))?;

    let hy_full = hy(&sim.path1, &sim.path2, 1.0)?.value;
    let hy_cont = hy(&sim.continuous1, &sim.continuous2, 1.0)?.value;
    let refresh_count = refresh_grid(&g1, &g2)?.count();
    Ok(RepOutcome { hy_full, hy_cont, refresh_count, redraws })
}

/// Theoretical (jump, continuous) asymptotic variances in the canonical
/// normalization, where known for the sampling kind.
fn theory(cfg: &McConfig) -> (Option<f64>, Option<f64>) {
    let moments = match cfg.sampling {
        PlanKind::Poisson { rate } => poisson_interval_moments(rate, rate),
        // synchronous deterministic grid: the straddling interval is one grid
        // step, no interpolation excess
        PlanKind::Regular => crate::sampling::IntervalStats { r1l1: 1.0, r2: 0.0, l2: 0.0, r3: 0.0, l3: 0.0 },
        _ => return (None, None),
    };
    let jump: f64 = cfg
        .scenario
        .sizes()
        .iter()
        .map(|&(s1, s2)| avar_cojump(s1, s2, 1.0, 1.0, cfg.rho, &moments))
        .sum();
    let continuous = match cfg.sampling {
        PlanKind::Poisson { rate } => {
            let lim = poisson_functional_limits(rate);
            avar_continuous(1.0, 1.0, cfg.rho, lim.g, lim.f, lim.h, 1.0).ok()
        }
        PlanKind::Regular => avar_continuous(1.0, 1.0, cfg.rho, 1.0, 0.0, 0.0, 1.0).ok(),
        _ => None,
    };
    (Some(jump), continuous)
}

/// Runs one configuration: per replicate fresh grids, fresh (separated) jump
/// times and one simulated path; the estimator with jumps and its
/// continuous-only counterpart share the path, and the jump variance is the
/// difference of the two Monte Carlo variances.
pub fn run_experiment(cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    let outcomes: Vec<RepOutcome> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| run_replicate(cfg, rep).map_err(|e| e.in_replicate(rep)))
        .collect::<Result<Vec<_>>>()?;

    let full: Vec<f64> = outcomes.iter().map(|o| o.hy_full).collect();
    let cont: Vec<f64> = outcomes.iter().map(|o| o.hy_cont).collect();
    let var_full = stats::variance(&full);
    let var_cont = stats::variance(&cont);
    let n = cfg.expected_obs as f64;
    let mean_refresh =
        outcomes.iter().map(|o| o.refresh_count as f64).sum::<f64>() / cfg.reps as f64;
    let (theory_jump, theory_continuous) = theory(cfg);

    Ok(McReport {
        scenario: cfg.scenario,
        rho: cfg.rho,
        reps: cfg.reps,
        n: cfg.expected_obs,
        mean_hy: stats::mean(&full),
        mean_hy_c: stats::mean(&cont),
        nvar_hy_j: n * (var_full - var_cont),
        nvar_hy_c: n * var_cont,
        se_mean: (var_full / cfg.reps as f64).sqrt(),
        theory_jump,
        theory_continuous,
        normalization: "expected_obs_per_component",
        mean_refresh_count: mean_refresh,
        nvar_hy_j_refresh: mean_refresh * (var_full - var_cont),
        nvar_hy_c_refresh: mean_refresh * var_cont,
        collision_redraws: outcomes.iter().map(|o| o.redraws).sum(),
    })
}

/// Independent experiments over a list of correlations; per-ρ seeds derive
/// from the template seed and the ρ index.
pub fn sweep_rho(template: &McConfig, rhos: &[f64]) -> Result<Vec<McReport>> {
    rhos.iter()
        .enumerate()
        .map(|(idx, &rho)| {
            let cfg = McConfig {
                rho,
                base_seed: template.base_seed ^ crate::rng::splitmix64(idx as u64),
                ..*template
            };
            run_experiment(&cfg)
        })
        .collect()
}

/// Canonical CSV header for report rows.
pub const CSV_HEADER: &str = "rho,mean_hy,mean_hy_c,nvar_hy_j,nvar_hy_c,theory_j,theory_c,se_mean,reps,n";

/// Writes reports in the canonical CSV schema, one row per configuration.
pub fn write_csv<W: Write>(reports: &[McReport], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.rho,
            r.mean_hy,
            r.mean_hy_c,
            r.nvar_hy_j,
            r.nvar_hy_c,
            opt(r.theory_jump),
            opt(r.theory_continuous),
            r.se_mean,
            r.reps,
            r.n
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> McConfig {
        McConfig::new(ScenarioTag::Sc1, 0.5, 400, 40, 11)
    }

    #[test]
    fn config_validation_names_violations() {
        let mut cfg = small_cfg();
        cfg.reps = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.expected_obs = 50;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg();
        cfg.scenario = ScenarioTag::Custom;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reports_are_bit_reproducible() {
        let cfg = small_cfg();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_hy.to_bits(), b.mean_hy.to_bits());
        assert_eq!(a.nvar_hy_j.to_bits(), b.nvar_hy_j.to_bits());
    }

    #[test]
    fn theory_columns_match_the_closed_forms() {
        let cfg = small_cfg();
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.theory_jump, Some(8.0 + 6.0 * 0.5));
        let tc = r.theory_continuous.unwrap();
        assert!((tc - (4.0 + 3.0 * 0.25)).abs() < 1e-12);
        // Sc3's jump theory is constant in ρ
        for rho in [0.0, 0.4, 0.9] {
            let cfg = McConfig::new(ScenarioTag::Sc3, rho, 400, 2, 1);
            assert_eq!(theory(&cfg).0, Some(8.0));
        }
        // Sc2 adds the two idiosyncratic contributions
        let cfg = McConfig::new(ScenarioTag::Sc2, 1.0, 400, 2, 1);
        assert_eq!(theory(&cfg).0, Some(22.0));
    }

    #[test]
    fn sweep_rho_orders_and_sizes_reports() {
        let template = McConfig::new(ScenarioTag::Sc1, 0.0, 400, 10, 3);
        let rhos = [0.0, 0.5, 1.0];
        let reports = sweep_rho(&template, &rhos).unwrap();
        assert_eq!(reports.len(), 3);
        for (r, rho) in reports.iter().zip(rhos) {
            assert_eq!(r.rho, rho);
        }
        assert!(sweep_rho(&template, &[]).unwrap().is_empty());
        // a single-element sweep reduces to run_experiment at the derived seed
        let single = sweep_rho(&template, &[0.5]).unwrap();
        let direct = run_experiment(&McConfig {
            rho: 0.5,
            base_seed: template.base_seed ^ crate::rng::splitmix64(0),
            ..template
        })
        .unwrap();
        assert_eq!(single[0], direct);
    }

    #[test]
    fn csv_schema_is_stable() {
        let cfg = small_cfg();
        let r = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 10);
        assert!(row.starts_with("0.5,"));
    }

    #[test]
    fn refresh_normalization_sits_at_two_thirds() {
        let r = run_experiment(&small_cfg()).unwrap();
        let ratio = r.mean_refresh_count / r.n as f64;
        assert!((ratio - 2.0 / 3.0).abs() < 0.05, "ratio {ratio}");
        assert!(
            (r.nvar_hy_c_refresh / r.nvar_hy_c - ratio).abs() < 1e-9,
            "normalizations disagree"
        );
    }

    #[test]
    fn interaction_guard_detects_shared_intervals() {
        let g1 = TimeGrid::new(vec![0.0, 0.4, 0.6, 1.0], 4).unwrap();
        let g2 = TimeGrid::new(vec![0.0, 0.5, 0.7, 1.0], 4).unwrap();
        // jump 1 in X1 at 0.45 (interval (0.4, 0.6]), jump 2 in X2 at 0.55
        // (interval (0.5, 0.7]): overlapping
        let interacting = JumpScenario::new(vec![
            crate::model::Jump { time: 0.45, size1: 1.0, size2: 0.0 },
            crate::model::Jump { time: 0.55, size1: 0.0, size2: 1.0 },
        ]);
        assert!(jumps_interact(&interacting, &g1, &g2));
        // far apart: no interaction
        let separated = JumpScenario::new(vec![
            crate::model::Jump { time: 0.1, size1: 1.0, size2: 0.0 },
            crate::model::Jump { time: 0.9, size1: 0.0, size2: 1.0 },
        ]);
        assert!(!jumps_interact(&separated, &g1, &g2));
        // a single co-jump never interacts with itself
        let co = JumpScenario::new(vec![crate::model::Jump { time: 0.45, size1: 1.0, size2: 1.0 }]);
        assert!(!jumps_interact(&co, &g1, &g2));
    }
}
