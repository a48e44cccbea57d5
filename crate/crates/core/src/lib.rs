//! Seeded agent-based simulation of a synthetic town during an epidemic:
//! disease spread through households, workplaces, schools, hospitals and
//! leisure, coupled to a small stock-flow consistent economy, with
//! containment policies, Monte Carlo batches and summary statistics.
//!
//! ```no_run
//! use townsim::{run_simulation, ScenarioSchedule, TownConfig};
//!
//! let cfg = TownConfig::default().with_population(2_000);
//! let schedule = ScenarioSchedule::preset("baseline").unwrap();
//! let run = run_simulation(&cfg, &schedule, 1).unwrap();
//! println!("deaths after 100 days: {}", run.deaths_at(100));
//! ```

pub mod clock;
pub mod config;
pub mod economy;
pub mod engine;
pub mod epidemic;
pub mod error;
pub mod export;
pub mod harness;
pub mod metrics;
pub mod policy;
pub mod rng;
pub mod social;
pub mod stats;
pub mod synth;
pub mod town;
pub mod types;

pub use clock::{Clock, Weekday};
pub use config::{TownConfig, SWEEPABLE};
pub use economy::SetupReport;
pub use engine::{PhaseStats, Simulation};
pub use epidemic::{assign_course, Course, DiseaseState};
pub use error::{ConfigError, HarnessError, ScenarioError, SetupError, SimError, StatsError};
pub use export::{read_batch, write_batch, write_run_csv};
pub use harness::{
    compare_batches, run_monte_carlo, run_simulation, sweep, Batch, RunFilter, SummaryStats,
};
pub use metrics::{DayRecord, RunMetrics};
pub use policy::{Policy, PolicySet, ScenarioSchedule, PRESETS};
pub use social::Activity;
pub use stats::{summarize, welch, Summary, WelchResult};
pub use town::Town;
pub use types::{AgentId, FiscalMode, InfectionSource, LocationKind, Profession};
