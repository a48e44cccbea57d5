//! CSV export of runs and batch manifests, and reading them back.
//!
//! Schema version 1: one file per run with a header row and one row per
//! day (day 0 is the state after setup). The manifest lists every run of
//! a batch with its filter outcome.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::harness::{Batch, RunFilter};
use crate::metrics::{DayRecord, RunMetrics};
use crate::types::{FiscalMode, InfectionSource};

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.csv";

const BASE_COLUMNS: [&str; 20] = [
    "day",
    "new_infections",
    "new_detected",
    "cum_infections",
    "cum_detected",
    "cum_deaths",
    "active_infections",
    "hospital",
    "icu",
    "output",
    "cum_output_lost_pct",
    "unemployment_rate",
    "thwarts",
    "friend_meetings",
    "commercial_visits",
    "gov_savings",
    "gov_purchase",
    "goods_price",
    "leisure_savings",
    "mean_leisure_price",
];

pub fn columns() -> Vec<&'static str> {
    let mut c = BASE_COLUMNS.to_vec();
    c.extend(InfectionSource::REPORTED.iter().map(|s| s.column()));
    c
}

fn row(d: &DayRecord) -> Vec<String> {
    let mut r = vec![
        d.day.to_string(),
        d.new_infections.to_string(),
        d.new_detected.to_string(),
        d.cum_infections.to_string(),
        d.cum_detected.to_string(),
        d.cum_deaths.to_string(),
        d.active_infections.to_string(),
        d.hospital.to_string(),
        d.icu.to_string(),
        d.output.to_string(),
        d.cum_output_lost_pct.to_string(),
        d.unemployment_rate.to_string(),
        d.thwarts.to_string(),
        d.friend_meetings.to_string(),
        d.commercial_visits.to_string(),
        d.gov_savings.to_string(),
        d.gov_purchase.to_string(),
        d.goods_price.to_string(),
        d.leisure_savings.to_string(),
        d.mean_leisure_price.to_string(),
    ];
    r.extend(d.inf_by_source.iter().map(|v| v.to_string()));
    r
}

pub fn write_run_csv(run: &RunMetrics, path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(columns())?;
    for d in &run.days {
        w.write_record(row(d))?;
    }
    w.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    path: &Path,
) -> Result<T, HarnessError> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        HarnessError::Batch(format!(
            "{}: bad value in column `{}`",
            path.display(),
            columns()[i]
        ))
    })
}

pub fn read_run_csv(path: &Path) -> Result<Vec<DayRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected = columns();
    if header != expected {
        let missing = expected
            .iter()
            .find(|c| !header.iter().any(|h| h == *c))
            .copied()
            .unwrap_or("order");
        return Err(HarnessError::Batch(format!(
            "{}: schema mismatch at column `{missing}`",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut inf_by_source = [0u64; 7];
        for (k, v) in inf_by_source.iter_mut().enumerate() {
            *v = parse(&rec, BASE_COLUMNS.len() + k, path)?;
        }
        out.push(DayRecord {
            day: parse(&rec, 0, path)?,
            new_infections: parse(&rec, 1, path)?,
            new_detected: parse(&rec, 2, path)?,
            cum_infections: parse(&rec, 3, path)?,
            cum_detected: parse(&rec, 4, path)?,
            cum_deaths: parse(&rec, 5, path)?,
            active_infections: parse(&rec, 6, path)?,
            hospital: parse(&rec, 7, path)?,
            icu: parse(&rec, 8, path)?,
            output: parse(&rec, 9, path)?,
            cum_output_lost_pct: parse(&rec, 10, path)?,
            unemployment_rate: parse(&rec, 11, path)?,
            thwarts: parse(&rec, 12, path)?,
            friend_meetings: parse(&rec, 13, path)?,
            commercial_visits: parse(&rec, 14, path)?,
            gov_savings: parse(&rec, 15, path)?,
            gov_purchase: parse(&rec, 16, path)?,
            goods_price: parse(&rec, 17, path)?,
            leisure_savings: parse(&rec, 18, path)?,
            mean_leisure_price: parse(&rec, 19, path)?,
            inf_by_source,
        });
    }
    Ok(out)
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub schema_version: u32,
    pub seed: u64,
    pub scenario: String,
    pub fiscal: String,
    pub horizon_days: u32,
    pub population: usize,
    pub filter: String,
    pub retained: bool,
    pub elimination_day: Option<u32>,
    pub setup_output: f64,
    pub initial_unemployment: f64,
    pub initial_leisure_savings: f64,
    pub file: String,
}

fn file_name(run: &RunMetrics) -> String {
    let scenario: String = run
        .scenario
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{}_{}_seed{}.csv", scenario, run.fiscal.name(), run.seed)
}

/// Write every run of a batch plus the manifest into `dir`.
pub fn write_batch(batch: &Batch, dir: &Path) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut all: Vec<(&RunMetrics, bool)> = batch
        .retained
        .iter()
        .map(|r| (r, true))
        .chain(batch.dropped.iter().map(|r| (r, false)))
        .collect();
    all.sort_by_key(|(r, _)| r.seed);
    let manifest = dir.join(MANIFEST_FILE);
    let mut w = csv::Writer::from_path(&manifest)?;
    for (run, retained) in all {
        let file = file_name(run);
        write_run_csv(run, &dir.join(&file))?;
        w.serialize(ManifestEntry {
            schema_version: CSV_SCHEMA_VERSION,
            seed: run.seed,
            scenario: run.scenario.clone(),
            fiscal: run.fiscal.name().to_string(),
            horizon_days: run.horizon_days,
            population: run.population,
            filter: batch.filter.name().to_string(),
            retained,
            elimination_day: run.elimination_day,
            setup_output: run.setup_output,
            initial_unemployment: run.initial_unemployment,
            initial_leisure_savings: run.initial_leisure_savings,
            file,
        })?;
    }
    w.flush()?;
    Ok(manifest)
}

/// Load a batch written by [`write_batch`].
pub fn read_batch(dir: &Path) -> Result<Batch, HarnessError> {
    let manifest = dir.join(MANIFEST_FILE);
    if !manifest.exists() {
        return Err(HarnessError::Batch(format!(
            "no {} in {}",
            MANIFEST_FILE,
            dir.display()
        )));
    }
    let mut r = csv::Reader::from_path(&manifest)?;
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    let mut scenario = None;
    let mut filter = RunFilter::None;
    for entry in r.deserialize::<ManifestEntry>() {
        let e = entry?;
        if e.schema_version != CSV_SCHEMA_VERSION {
            return Err(HarnessError::Batch(format!(
                "unsupported schema version {}",
                e.schema_version
            )));
        }
        filter = RunFilter::parse(&e.filter)?;
        let fiscal = FiscalMode::parse(&e.fiscal)
            .ok_or_else(|| HarnessError::UnknownFiscalMode(e.fiscal.clone()))?;
        scenario.get_or_insert_with(|| e.scenario.clone());
        let run = RunMetrics {
            seed: e.seed,
            scenario: e.scenario,
            fiscal,
            horizon_days: e.horizon_days,
            population: e.population,
            setup_output: e.setup_output,
            initial_unemployment: e.initial_unemployment,
            initial_leisure_savings: e.initial_leisure_savings,
            elimination_day: e.elimination_day,
            days: read_run_csv(&dir.join(&e.file))?,
        };
        if e.retained {
            retained.push(run);
        } else {
            dropped.push(run);
        }
    }
    Ok(Batch {
        scenario: scenario.unwrap_or_default(),
        filter,
        retained,
        dropped,
    })
}
