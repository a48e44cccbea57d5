use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use townsim::{
    compare_batches, read_batch, run_monte_carlo, sweep, write_batch, Batch, FiscalMode,
    HarnessError, RunFilter, ScenarioSchedule, TownConfig,
};

#[derive(Parser)]
#[command(
    name = "townsim",
    version,
    about = "Seeded town epidemic and economy simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single seed and export its daily metrics.
    Run(RunArgs),
    /// Run a Monte Carlo batch over consecutive seeds.
    Mc(BatchArgs),
    /// One batch per value of a sweepable parameter.
    Sweep(SweepArgs),
    /// Summary statistics and Welch tests over exported batches.
    Summarize(SummarizeArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Parameter file (TOML); the bundled defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name (baseline, rapid, delayed, baseline+lift100, none) or a scenario file.
    #[arg(long, default_value = "baseline")]
    scenario: String,
    /// Fiscal regime: zero-deficit or fixed (defaults to the scenario's).
    #[arg(long)]
    fiscal: Option<String>,
    /// First seed.
    #[arg(long, default_value_t = 1)]
    seed_start: u64,
    /// Days to simulate (defaults to the scenario horizon).
    #[arg(long)]
    days: Option<u32>,
    /// Number of agents (overrides the parameter file).
    #[arg(long)]
    population: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct BatchArgs {
    #[command(flatten)]
    common: Common,
    /// Number of seeds.
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    /// extant300, eliminated100 or none.
    #[arg(long, default_value = "none")]
    filter: String,
    /// Worker threads (all cores when omitted).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// beta, epsilon, omega, kappa, mu_l, sigma or population.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Batch directories written by `mc`, `run` or `sweep`.
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Day at which deaths and output lost are compared.
    #[arg(long, default_value_t = 100)]
    day: u32,
    /// Parameter file, for the persons-per-agent scale.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn load_config(path: &Option<PathBuf>) -> Result<TownConfig> {
    Ok(match path {
        Some(p) => {
            TownConfig::from_path(p).with_context(|| format!("invalid config {}", p.display()))?
        }
        None => TownConfig::default(),
    })
}

fn load_inputs(c: &Common) -> Result<(TownConfig, ScenarioSchedule)> {
    let mut cfg = load_config(&c.config)?;
    if let Some(n) = c.population {
        cfg = cfg.with_population(n);
    }
    let mut schedule = ScenarioSchedule::resolve(&c.scenario)?;
    if let Some(f) = &c.fiscal {
        let mode =
            FiscalMode::parse(f).ok_or_else(|| HarnessError::UnknownFiscalMode(f.clone()))?;
        schedule = schedule.with_fiscal(mode);
    }
    if let Some(d) = c.days {
        schedule = schedule.with_horizon(d);
    }
    Ok((cfg, schedule))
}

fn seeds(start: u64, n: u64) -> Vec<u64> {
    (start..start + n).collect()
}

fn report(batch: &Batch, dir: &Path) {
    println!(
        "{}: {} runs retained, {} dropped ({} filter) -> {}",
        batch.scenario,
        batch.retained.len(),
        batch.dropped.len(),
        batch.filter.name(),
        dir.display()
    );
}

fn run_batch(args: &BatchArgs) -> Result<()> {
    let (cfg, schedule) = load_inputs(&args.common)?;
    let filter = RunFilter::parse(&args.filter)?;
    let batch = run_monte_carlo(
        &cfg,
        &schedule,
        &seeds(args.common.seed_start, args.seeds),
        filter,
        args.jobs,
    )?;
    write_batch(&batch, &args.common.out)?;
    report(&batch, &args.common.out);
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let (cfg, schedule) = load_inputs(&a.common)?;
            let batch = run_monte_carlo(
                &cfg,
                &schedule,
                &[a.common.seed_start],
                RunFilter::None,
                Some(1),
            )?;
            write_batch(&batch, &a.common.out)?;
            let run = &batch.retained[0];
            let last = run.days.last().expect("day 0 is always recorded");
            println!(
                "seed {} {}: day {} deaths {} infections {} output lost {:.2}% -> {}",
                run.seed,
                run.scenario,
                last.day,
                last.cum_deaths,
                last.cum_infections,
                last.cum_output_lost_pct,
                a.common.out.display()
            );
        }
        Command::Mc(a) => run_batch(&a)?,
        Command::Sweep(a) => {
            let (cfg, schedule) = load_inputs(&a.batch.common)?;
            let filter = RunFilter::parse(&a.batch.filter)?;
            let s = seeds(a.batch.common.seed_start, a.batch.seeds);
            let batches = sweep(
                &cfg,
                &a.param,
                &a.values,
                &schedule,
                &s,
                filter,
                a.batch.jobs,
            )?;
            for (v, batch) in &batches {
                let dir = a.batch.common.out.join(format!("{}={}", a.param, v));
                write_batch(batch, &dir)?;
                report(batch, &dir);
            }
        }
        Command::Summarize(a) => {
            let cfg = load_config(&a.config)?;
            let mut batches = Vec::new();
            for d in &a.dirs {
                let mut b =
                    read_batch(d).with_context(|| format!("cannot load batch {}", d.display()))?;
                if a.dirs.len() > 1 {
                    b.scenario = format!("{} [{}]", b.scenario, d.display());
                }
                batches.push(b);
            }
            if batches.iter().all(|b| b.retained.is_empty()) {
                bail!("no retained runs in the given batches");
            }
            print!("{}", compare_batches(&batches, a.day, cfg.population.scale));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
