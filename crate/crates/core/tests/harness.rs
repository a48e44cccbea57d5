use std::fs;

use townsim::export::{read_run_csv, MANIFEST_FILE};
use townsim::{
    compare_batches, read_batch, run_monte_carlo, sweep, write_batch, write_run_csv, Batch,
    DayRecord, FiscalMode, HarnessError, RunFilter, RunMetrics, ScenarioSchedule, TownConfig,
};

fn cfg() -> TownConfig {
    let mut c = TownConfig::default().with_population(1_500);
    c.population.initial_infected_share = 0.004;
    c
}

fn synthetic_run(seed: u64, active: &[u64]) -> RunMetrics {
    let days = active
        .iter()
        .enumerate()
        .map(|(d, &a)| DayRecord {
            day: d as u32,
            active_infections: a,
            ..DayRecord::default()
        })
        .collect();
    RunMetrics {
        seed,
        scenario: "synthetic".into(),
        fiscal: FiscalMode::Fixed,
        horizon_days: active.len() as u32 - 1,
        population: 10,
        setup_output: 1.0,
        initial_unemployment: 0.0,
        initial_leisure_savings: 0.0,
        elimination_day: active.iter().position(|&a| a == 0).map(|d| d as u32),
        days,
    }
}

#[test]
fn filters_follow_the_extinction_rule() {
    let mut early = vec![3u64; 41];
    early.extend(vec![0u64; 60]);
    let eliminated = synthetic_run(1, &early);
    let extant = synthetic_run(2, &[5u64; 101]);
    assert!(!RunFilter::Extant300.keep(&eliminated));
    assert!(RunFilter::Extant300.keep(&extant));
    assert!(RunFilter::Eliminated100.keep(&eliminated));
    assert!(!RunFilter::Eliminated100.keep(&extant));
    assert!(RunFilter::None.keep(&eliminated) && RunFilter::None.keep(&extant));
    let batch = Batch::from_runs(
        "s".into(),
        RunFilter::Extant300,
        vec![eliminated.clone(), extant.clone()],
    );
    assert_eq!(batch.retained, vec![extant]);
    assert_eq!(batch.dropped, vec![eliminated]);
    assert!(matches!(
        RunFilter::parse("sometimes"),
        Err(HarnessError::UnknownFilter(_))
    ));
}

#[test]
fn export_has_one_row_per_day_and_is_reproducible() {
    let schedule = ScenarioSchedule::preset("baseline").unwrap();
    let batch = run_monte_carlo(&cfg(), &schedule, &[1], RunFilter::None, Some(1)).unwrap();
    let run = &batch.retained[0];
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_run_csv(run, &a).unwrap();
    write_run_csv(run, &b).unwrap();
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 1 + 101);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let days = read_run_csv(&a).unwrap();
    assert_eq!(&days, &run.days);
    assert!(days.windows(2).all(|w| w[1].cum_deaths >= w[0].cum_deaths));
    assert!(days
        .windows(2)
        .all(|w| w[1].cum_infections >= w[0].cum_infections));
}

#[test]
fn batches_round_trip_and_refilter() {
    let schedule = ScenarioSchedule::preset("rapid").unwrap().with_horizon(40);
    let seeds: Vec<u64> = (1..=4).collect();
    let batch = run_monte_carlo(&cfg(), &schedule, &seeds, RunFilter::Eliminated100, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_batch(&batch, dir.path()).unwrap();
    assert!(dir.path().join(MANIFEST_FILE).exists());
    let loaded = read_batch(dir.path()).unwrap();
    assert_eq!(loaded, batch);
    let again = loaded.refilter(RunFilter::Eliminated100);
    assert_eq!(again, batch);
    let all = loaded.refilter(RunFilter::None);
    assert_eq!(all.retained.len(), 4);
}

#[test]
fn missing_manifest_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_batch(dir.path()),
        Err(HarnessError::Batch(_))
    ));
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let schedule = ScenarioSchedule::preset("baseline")
        .unwrap()
        .with_horizon(30);
    let seeds = [3, 1, 2];
    let one = run_monte_carlo(&cfg(), &schedule, &seeds, RunFilter::None, Some(1)).unwrap();
    let three = run_monte_carlo(&cfg(), &schedule, &seeds, RunFilter::None, Some(3)).unwrap();
    assert_eq!(one, three);
    assert_eq!(
        one.retained.iter().map(|r| r.seed).collect::<Vec<_>>(),
        vec![3, 1, 2]
    );
}

#[test]
fn sweeps_reject_unknown_parameters() {
    let schedule = ScenarioSchedule::empty(5);
    let err = sweep(
        &cfg(),
        "gravity",
        &[1.0],
        &schedule,
        &[1],
        RunFilter::None,
        Some(1),
    )
    .unwrap_err();
    assert!(err.to_string().contains("gravity"));
    let ok = sweep(
        &cfg(),
        "beta",
        &[0.09, 0.1],
        &schedule,
        &[1],
        RunFilter::None,
        Some(1),
    )
    .unwrap();
    assert_eq!(ok.len(), 2);
    assert_eq!(ok[0].0, 0.09);
}

#[test]
fn identical_batches_have_no_welch_test() {
    let run = synthetic_run(1, &[1, 1, 1]);
    let batch = Batch::from_runs("x".into(), RunFilter::None, vec![run.clone(), run]);
    let stats = compare_batches(&[batch.clone(), batch], 2, 1000.0);
    assert_eq!(stats.scenarios[0].deaths_thousands.sd, 0.0);
    assert!(stats.comparisons[0].deaths.is_none());
    assert!(stats.to_string().contains("undefined"));
}

#[test]
fn no_seeds_is_an_error() {
    let schedule = ScenarioSchedule::empty(5);
    assert!(matches!(
        run_monte_carlo(&cfg(), &schedule, &[], RunFilter::None, None),
        Err(HarnessError::NoSeeds)
    ));
}
