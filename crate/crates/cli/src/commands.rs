//! Subcommand implementations. Each command resolves its configuration,
//! computes results, writes the canonical CSV (or its JSON mirror) plus a
//! resolved-config sidecar, and reports the files it wrote.

use std::fmt::Write as _;

use asyncov::estimators::{hy, hy_rep, rv, Representation};
use asyncov::model::{JumpScenario, ModelSpec, ScenarioTag};
use asyncov::montecarlo::{run_experiment, sweep_rho, McConfig, McReport, CSV_HEADER};
use asyncov::rng::{derive_seed, splitmix64, substream, Stream};
use asyncov::sampling::{grid_functionals, univariate_g, SamplingPlan, TimeGrid};
use asyncov::simulate::{build_union_grid, draw_scenario_jumps_with, simulate_bivariate, SimulationOutput};
use asyncov::{Error, Result};
use serde::Serialize;

use crate::config::{parse_scenario, Config};
use crate::output::OutputSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub struct Run<'a> {
    pub config: &'a Config,
    pub seed: u64,
    pub format: Format,
}

#[derive(Serialize)]
struct SidecarMeta<'a> {
    command: &'a str,
    seed: u64,
    format: &'a str,
    out: String,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    run: SidecarMeta<'a>,
    #[serde(flatten)]
    config: &'a Config,
}

fn write_sidecar(out: &mut OutputSet, run: &Run, command: &str) -> Result<()> {
    let sidecar = Sidecar {
        run: SidecarMeta {
            command,
            seed: run.seed,
            format: run.format.as_str(),
            out: out.dir().display().to_string(),
        },
        config: run.config,
    };
    let text = toml::to_string_pretty(&sidecar)
        .map_err(|e| Error::Config(format!("sidecar serialization: {e}")))?;
    out.write(&format!("{command}.config.toml"), &text)?;
    Ok(())
}

/// Rows as (header, records); rendered as CSV or as a JSON array of objects
/// mirroring the columns field for field.
fn emit_rows(
    out: &mut OutputSet,
    format: Format,
    stem: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut text = String::new();
            writeln!(text, "{}", header.join(",")).unwrap();
            for row in rows {
                writeln!(text, "{}", row.join(",")).unwrap();
            }
            out.write(&format!("{stem}.csv"), &text)?;
        }
        Format::Json => {
            let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| {
                            let value = v
                                .parse::<f64>()
                                .map(|x| {
                                    serde_json::Number::from_f64(x)
                                        .map(serde_json::Value::Number)
                                        .unwrap_or(serde_json::Value::Null)
                                })
                                .unwrap_or_else(|_| serde_json::Value::String(v.clone()));
                            (k.to_string(), value)
                        })
                        .collect()
                })
                .collect();
            let text = serde_json::to_string_pretty(&objects)
                .map_err(|e| Error::Config(format!("json serialization: {e}")))?;
            out.write(&format!("{stem}.json"), &text)?;
        }
    }
    Ok(())
}

fn model_from(config: &Config, scenario: &str, seed: u64) -> Result<ModelSpec> {
    let jumps = match scenario {
        "none" => JumpScenario::none(),
        s => {
            let tag: ScenarioTag = parse_scenario(s)?;
            let mut rng = substream(seed, 0, Stream::JumpTimes);
            draw_scenario_jumps_with(tag, &mut rng)?
        }
    };
    let m = &config.model;
    ModelSpec::new([m.drift1, m.drift2], m.vol1, m.vol2, m.rho, m.horizon, jumps)
}

fn simulate_once(config: &Config, scenario: &str, seed: u64) -> Result<(ModelSpec, TimeGrid, TimeGrid, SimulationOutput)> {
    let kind = config.sampling.kind()?;
    let n = config.sampling.n;
    let g1 = SamplingPlan { kind, n, seed: derive_seed(seed, 0, Stream::Grid1) }.generate()?;
    let g2 = SamplingPlan { kind, n, seed: derive_seed(seed, 0, Stream::Grid2) }.generate()?;
    let spec = model_from(config, scenario, seed)?;
    let union = build_union_grid(&g1, &g2, &spec.jumps.times())?;
    let sim = simulate_bivariate(&spec, &union, derive_seed(seed, 0, Stream::Path))?;
    Ok((spec, g1, g2, sim))
}

pub fn cmd_simulate(run: &Run, out: &mut OutputSet) -> Result<()> {
    let (_, g1, g2, sim) = simulate_once(run.config, &run.config.simulate.scenario, run.seed)?;

    let header = ["component", "index", "time", "value", "continuous"];
    let mut rows = Vec::new();
    for (path, cont) in [(&sim.path1, &sim.continuous1), (&sim.path2, &sim.continuous2)] {
        for (i, (&t, (&v, &c))) in path
            .grid()
            .times()
            .iter()
            .zip(path.values().iter().zip(cont.values()))
            .enumerate()
        {
            rows.push(vec![
                path.component().to_string(),
                i.to_string(),
                t.to_string(),
                v.to_string(),
                c.to_string(),
            ]);
        }
    }
    emit_rows(out, run.format, "paths", &header, &rows)?;

    let mut buf = Vec::new();
    g1.write_two_column(&mut buf)?;
    out.write("grid1.txt", &String::from_utf8_lossy(&buf))?;
    buf.clear();
    g2.write_two_column(&mut buf)?;
    out.write("grid2.txt", &String::from_utf8_lossy(&buf))?;
    write_sidecar(out, run, "simulate")
}

pub fn cmd_estimate(run: &Run, out: &mut OutputSet) -> Result<()> {
    let t = run.config.estimate.t;
    let (spec, _, _, sim) = simulate_once(run.config, &run.config.estimate.scenario, run.seed)?;

    let header = ["estimator", "value", "t", "boundary_residual"];
    let mut rows = Vec::new();
    let mut push = |name: &str, value: f64, residual: f64| {
        rows.push(vec![name.to_string(), value.to_string(), t.to_string(), residual.to_string()]);
    };
    let rv1 = rv(&sim.path1, t)?;
    let rv2 = rv(&sim.path2, t)?;
    push("rv1", rv1.value, rv1.boundary_residual);
    push("rv2", rv2.value, rv2.boundary_residual);
    let hy_ds = hy(&sim.path1, &sim.path2, t)?;
    push("hy", hy_ds.value, hy_ds.boundary_residual);
    for (name, rep) in [
        ("hy_rep1", Representation::Rep1),
        ("hy_rep2", Representation::Rep2),
        ("hy_rep3", Representation::Rep3),
    ] {
        let r = hy_rep(&sim.path1, &sim.path2, t, rep)?;
        push(name, r.value, r.boundary_residual);
    }
    let hy_c = hy(&sim.continuous1, &sim.continuous2, t)?;
    push("hy_continuous", hy_c.value, hy_c.boundary_residual);
    push("qcov_theoretical", spec.theoretical_qcov(t)?, 0.0);

    emit_rows(out, run.format, "estimates", &header, &rows)?;
    write_sidecar(out, run, "estimate")
}

pub fn cmd_functionals(run: &Run, out: &mut OutputSet) -> Result<()> {
    let kind = run.config.sampling.kind()?;
    let seeds = run.config.functionals.seeds.max(1);
    let header = ["n", "g_n", "f_n", "h_n", "univariate_g"];
    let mut rows = Vec::new();
    for &n in &run.config.functionals.n_values {
        let draws = if kind.is_random() { seeds } else { 1 };
        let (mut g_acc, mut f_acc, mut h_acc, mut u_acc) = (0.0, 0.0, 0.0, 0.0);
        for d in 0..draws {
            let s1 = derive_seed(run.seed, d as u64, Stream::Grid1);
            let s2 = derive_seed(run.seed, d as u64, Stream::Grid2);
            let g1 = SamplingPlan { kind, n, seed: s1 }.generate()?;
            let g2 = SamplingPlan { kind, n, seed: s2 }.generate()?;
            let f = grid_functionals(&g1, &g2, 1.0)?;
            g_acc += f.g;
            f_acc += f.f;
            h_acc += f.h;
            u_acc += univariate_g(&g1, 1.0, n);
        }
        let k = draws as f64;
        rows.push(vec![
            n.to_string(),
            (g_acc / k).to_string(),
            (f_acc / k).to_string(),
            (h_acc / k).to_string(),
            (u_acc / k).to_string(),
        ]);
    }
    emit_rows(out, run.format, "functionals", &header, &rows)?;
    write_sidecar(out, run, "functionals")
}

fn report_row(r: &McReport) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        r.rho.to_string(),
        r.mean_hy.to_string(),
        r.mean_hy_c.to_string(),
        r.nvar_hy_j.to_string(),
        r.nvar_hy_c.to_string(),
        opt(r.theory_jump),
        opt(r.theory_continuous),
        r.se_mean.to_string(),
        r.reps.to_string(),
        r.n.to_string(),
    ]
}

fn summary_line(r: &McReport) -> String {
    let paren = |v: Option<f64>| v.map(|x| format!(" ({x:.2})")).unwrap_or_default();
    format!(
        "{} rho={:.2}: mean(HY)={:.3} mean(HY_C)={:.3} n·var(HY(J))={:.2}{} n·var(HY(C))={:.2}{} [refresh-normalized: {:.2}/{:.2}; redraws {}]",
        r.scenario,
        r.rho,
        r.mean_hy,
        r.mean_hy_c,
        r.nvar_hy_j,
        paren(r.theory_jump),
        r.nvar_hy_c,
        paren(r.theory_continuous),
        r.nvar_hy_j_refresh,
        r.nvar_hy_c_refresh,
        r.collision_redraws,
    )
}

pub fn cmd_mc(run: &Run, out: &mut OutputSet, scenario: Option<&str>, rho: Option<f64>) -> Result<()> {
    let section = &run.config.mc;
    let scenario = parse_scenario(scenario.unwrap_or(&section.scenario))?;
    let mut cfg = McConfig::new(
        scenario,
        rho.unwrap_or(section.rho),
        section.expected_obs,
        section.reps,
        run.seed,
    );
    cfg.sampling = run.config.sampling.kind()?;
    let report = run_experiment(&cfg)?;

    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    emit_rows(out, run.format, "mc", &header, &[report_row(&report)])?;
    let full = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Config(format!("json serialization: {e}")))?;
    out.write("mc_report.json", &full)?;
    out.write("mc_summary.txt", &format!("{}\n", summary_line(&report)))?;
    write_sidecar(out, run, "mc")
}

pub fn cmd_table1(
    run: &Run,
    out: &mut OutputSet,
    scenario: Option<&str>,
    rhos: Option<&[f64]>,
) -> Result<()> {
    let section = &run.config.table1;
    let scenario_names: Vec<String> = match scenario {
        Some(s) => vec![s.to_string()],
        None => section.scenarios.clone(),
    };
    let rhos: Vec<f64> = rhos.map(|r| r.to_vec()).unwrap_or_else(|| section.rhos.clone());

    let mut all = Vec::new();
    for (si, name) in scenario_names.iter().enumerate() {
        let tag = parse_scenario(name)?;
        let mut template = McConfig::new(
            tag,
            0.0,
            section.expected_obs,
            section.reps,
            run.seed ^ splitmix64(si as u64),
        );
        template.sampling = run.config.sampling.kind()?;
        all.extend(sweep_rho(&template, &rhos)?);
    }

    let mut header = vec!["scenario"];
    header.extend(CSV_HEADER.split(','));
    let rows: Vec<Vec<String>> = all
        .iter()
        .map(|r| {
            let mut row = vec![r.scenario.to_string()];
            row.extend(report_row(r));
            row
        })
        .collect();
    emit_rows(out, run.format, "table1", &header, &rows)?;

    let full = serde_json::to_string_pretty(&all)
        .map_err(|e| Error::Config(format!("json serialization: {e}")))?;
    out.write("table1_report.json", &full)?;

    let mut summary = String::from(
        "Monte Carlo covariation estimates, theoretical values in parentheses\n",
    );
    for r in &all {
        writeln!(summary, "{}", summary_line(r)).unwrap();
    }
    out.write("table1_summary.txt", &summary)?;
    write_sidecar(out, run, "table1")
}
