//! Single runs, Monte Carlo batches, run filters, sweeps and scenario
//! comparisons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TownConfig;
use crate::engine::Simulation;
use crate::error::{HarnessError, SimError};
use crate::metrics::RunMetrics;
use crate::policy::ScenarioSchedule;
use crate::stats::{summarize, welch, Summary, WelchResult};

/// Deterministic full run of one seed.
pub fn run_simulation(
    cfg: &TownConfig,
    schedule: &ScenarioSchedule,
    seed: u64,
) -> Result<RunMetrics, SimError> {
    Simulation::new(cfg.clone(), schedule.clone(), seed)?.run()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunFilter {
    /// Keep runs with someone still infected at period 300.
    Extant300,
    /// Keep runs in which the virus died out within 100 days.
    Eliminated100,
    None,
}

impl RunFilter {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "extant300" => Ok(RunFilter::Extant300),
            "eliminated100" => Ok(RunFilter::Eliminated100),
            "none" => Ok(RunFilter::None),
            other => Err(HarnessError::UnknownFilter(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RunFilter::Extant300 => "extant300",
            RunFilter::Eliminated100 => "eliminated100",
            RunFilter::None => "none",
        }
    }

    pub fn keep(self, run: &RunMetrics) -> bool {
        match self {
            RunFilter::Extant300 => run.extant_at_period(300),
            RunFilter::Eliminated100 => run.eliminated_by(100),
            RunFilter::None => true,
        }
    }
}

/// Runs of one scenario, split by the filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub scenario: String,
    pub filter: RunFilter,
    pub retained: Vec<RunMetrics>,
    pub dropped: Vec<RunMetrics>,
}

impl Batch {
    pub fn from_runs(scenario: String, filter: RunFilter, runs: Vec<RunMetrics>) -> Self {
        let (retained, dropped): (Vec<_>, Vec<_>) = runs.into_iter().partition(|r| filter.keep(r));
        if retained.is_empty() {
            log::warn!("no run of `{scenario}` passed the {} filter", filter.name());
        }
        Batch {
            scenario,
            filter,
            retained,
            dropped,
        }
    }

    /// Re-apply a (possibly different) filter to every run.
    pub fn refilter(&self, filter: RunFilter) -> Batch {
        let mut all: Vec<RunMetrics> = self.retained.iter().chain(&self.dropped).cloned().collect();
        all.sort_by_key(|r| r.seed);
        Batch::from_runs(self.scenario.clone(), filter, all)
    }

    pub fn deaths_thousands(&self, day: u32, scale: f64) -> Vec<f64> {
        self.retained
            .iter()
            .map(|r| r.deaths_thousands_at(day, scale))
            .collect()
    }

    pub fn output_lost(&self, day: u32) -> Vec<f64> {
        self.retained
            .iter()
            .map(|r| r.output_lost_at(day))
            .collect()
    }
}

/// Run every seed (in parallel, results ordered by seed) and filter.
pub fn run_monte_carlo(
    cfg: &TownConfig,
    schedule: &ScenarioSchedule,
    seeds: &[u64],
    filter: RunFilter,
    jobs: Option<usize>,
) -> Result<Batch, HarnessError> {
    if seeds.is_empty() {
        return Err(HarnessError::NoSeeds);
    }
    let work = || -> Result<Vec<RunMetrics>, SimError> {
        seeds
            .par_iter()
            .map(|&s| run_simulation(cfg, schedule, s))
            .collect()
    };
    let runs = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::Batch(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    Ok(Batch::from_runs(schedule.name.clone(), filter, runs))
}

/// One Monte Carlo batch per parameter value, with shared seeds.
pub fn sweep(
    cfg: &TownConfig,
    parameter: &str,
    values: &[f64],
    schedule: &ScenarioSchedule,
    seeds: &[u64],
    filter: RunFilter,
    jobs: Option<usize>,
) -> Result<Vec<(f64, Batch)>, HarnessError> {
    values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.set_parameter(parameter, v)?;
            Ok((v, run_monte_carlo(&c, schedule, seeds, filter, jobs)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioStats {
    pub scenario: String,
    pub runs: usize,
    pub dropped: usize,
    pub deaths_thousands: Summary,
    pub output_lost_pct: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub deaths: Option<WelchResult>,
    pub output_lost: Option<WelchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub day: u32,
    pub scenarios: Vec<ScenarioStats>,
    pub comparisons: Vec<Comparison>,
}

/// Means and SDs at `day` plus pairwise Welch tests. Tests are omitted
/// where undefined (fewer than two runs or no variance).
pub fn compare_batches(batches: &[Batch], day: u32, scale: f64) -> SummaryStats {
    let scenarios = batches
        .iter()
        .map(|b| ScenarioStats {
            scenario: b.scenario.clone(),
            runs: b.retained.len(),
            dropped: b.dropped.len(),
            deaths_thousands: summarize(&b.deaths_thousands(day, scale)),
            output_lost_pct: summarize(&b.output_lost(day)),
        })
        .collect();
    let mut comparisons = Vec::new();
    for i in 0..batches.len() {
        for j in i + 1..batches.len() {
            let (a, b) = (&batches[i], &batches[j]);
            comparisons.push(Comparison {
                a: a.scenario.clone(),
                b: b.scenario.clone(),
                deaths: welch(
                    &a.deaths_thousands(day, scale),
                    &b.deaths_thousands(day, scale),
                )
                .ok(),
                output_lost: welch(&a.output_lost(day), &b.output_lost(day)).ok(),
            });
        }
    }
    SummaryStats {
        day,
        scenarios,
        comparisons,
    }
}

impl std::fmt::Display for SummaryStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "day {}", self.day)?;
        writeln!(
            f,
            "{:<24} {:>5} {:>7} {:>20} {:>20}",
            "scenario", "runs", "dropped", "deaths (k)", "output lost %"
        )?;
        for s in &self.scenarios {
            writeln!(
                f,
                "{:<24} {:>5} {:>7} {:>9.3} ({:>8.3}) {:>9.3} ({:>8.3})",
                s.scenario,
                s.runs,
                s.dropped,
                s.deaths_thousands.mean,
                s.deaths_thousands.sd,
                s.output_lost_pct.mean,
                s.output_lost_pct.sd
            )?;
        }
        for c in &self.comparisons {
            let show = |w: &Option<WelchResult>| match w {
                Some(w) => format!("t = {:.3}, dof = {:.1}, p = {:.4}", w.t, w.dof, w.p),
                None => "undefined".to_string(),
            };
            writeln!(
                f,
                "{} vs {}: deaths {}; output lost {}",
                c.a,
                c.b,
                show(&c.deaths),
                show(&c.output_lost)
            )?;
        }
        Ok(())
    }
}
