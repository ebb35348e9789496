//! Batch front end: simulate paths, compute estimates, evaluate grid
//! functionals, and run the Monte Carlo experiments, writing CSV/JSON plus a
//! resolved-config sidecar per run.
//!
//! Flags can also be set through environment variables with the `ASYNCOV_`
//! prefix (`ASYNCOV_CONFIG`, `ASYNCOV_OUT`, `ASYNCOV_SEED`, `ASYNCOV_FORMAT`,
//! `ASYNCOV_THREADS`); explicit flags win.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use asyncov::Error;
use commands::{cmd_estimate, cmd_functionals, cmd_mc, cmd_simulate, cmd_table1, Format, Run};
use config::Config;
use output::OutputSet;

/// Default seed for reproducible runs; override with --seed.
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "asyncov", version, about = "Jump-diffusion simulation and quadratic-covariation estimation experiments")]
struct Cli {
    /// TOML config file (flat sections per subcommand); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format for result tables.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Worker threads for Monte Carlo replicates (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one bivariate path on fresh observation grids.
    Simulate,
    /// Simulate once and evaluate RV, the covariation estimator and its representations.
    Estimate,
    /// Evaluate the grid functionals over a range of n values.
    Functionals,
    /// Run one Monte Carlo configuration.
    Mc {
        /// Scenario override (sc1 | sc2 | sc3).
        #[arg(long)]
        scenario: Option<String>,
        /// Correlation override.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Run the full scenario × correlation sweep and write the result table.
    Table1 {
        /// Restrict to one scenario (sc1 | sc2 | sc3).
        #[arg(long)]
        scenario: Option<String>,
        /// Comma-separated correlation list, e.g. 0,0.5,1.
        #[arg(long, value_delimiter = ',')]
        rhos: Option<Vec<f64>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Estimate => "estimate",
            Command::Functionals => "functionals",
            Command::Mc { .. } => "mc",
            Command::Table1 { .. } => "table1",
        }
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(format!("ASYNCOV_{name}")).ok().filter(|s| !s.is_empty())
}

fn run() -> Result<Vec<PathBuf>, Error> {
    let cli = Cli::parse();

    let config_path = cli
        .config
        .or_else(|| env_var("CONFIG").map(PathBuf::from));
    let config = match &config_path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };

    let seed = cli
        .seed
        .or_else(|| env_var("SEED").and_then(|s| s.parse().ok()))
        .unwrap_or(DEFAULT_SEED);
    let format = match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => match env_var("FORMAT").as_deref() {
            Some("json") => Format::Json,
            _ => Format::Csv,
        },
    };
    let threads = cli
        .threads
        .or_else(|| env_var("THREADS").and_then(|s| s.parse().ok()));
    if let Some(t) = threads {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out_dir = cli
        .out
        .or_else(|| env_var("OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cli.command.name()));

    let run = Run { config: &config, seed, format };
    let mut out = OutputSet::create(&out_dir)?;
    let result = match &cli.command {
        Command::Simulate => cmd_simulate(&run, &mut out),
        Command::Estimate => cmd_estimate(&run, &mut out),
        Command::Functionals => cmd_functionals(&run, &mut out),
        Command::Mc { scenario, rho } => cmd_mc(&run, &mut out, scenario.as_deref(), *rho),
        Command::Table1 { scenario, rhos } => {
            cmd_table1(&run, &mut out, scenario.as_deref(), rhos.as_deref())
        }
    };
    match result {
        Ok(()) => Ok(out.files().to_vec()),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match &e {
                Error::Config(msg) if msg.starts_with("config not found") => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
