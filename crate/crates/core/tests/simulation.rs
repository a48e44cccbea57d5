use townsim::types::NONE;
use townsim::{
    Activity, FiscalMode, LocationKind, Profession, ScenarioSchedule, Simulation, TownConfig,
};

fn small(n: usize) -> TownConfig {
    TownConfig::default().with_population(n)
}

fn with_policies(days: u32, policies: &[&str]) -> ScenarioSchedule {
    let list: Vec<String> = policies.iter().map(|p| format!("\"{p}\"")).collect();
    let text = format!(
        "name = \"test\"\nhorizon_days = {days}\n[[events]]\nday = 0\nactivate = [{}]\n",
        list.join(", ")
    );
    ScenarioSchedule::from_toml_str(&text).unwrap()
}

fn virus_free(n: usize) -> TownConfig {
    let mut cfg = small(n);
    cfg.population.initial_infected_share = 0.0;
    cfg
}

#[test]
fn same_seed_same_metrics() {
    let cfg = small(3_000);
    let s = ScenarioSchedule::preset("baseline")
        .unwrap()
        .with_horizon(20);
    let a = townsim::run_simulation(&cfg, &s, 4).unwrap();
    let b = townsim::run_simulation(&cfg, &s, 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.days.len(), 21);
}

#[test]
fn empty_schedule_matches_policy_free_preset() {
    let cfg = small(2_500);
    let none = ScenarioSchedule::preset("none")
        .unwrap()
        .with_horizon(15)
        .with_fiscal(FiscalMode::Fixed);
    let empty = ScenarioSchedule::empty(15).with_fiscal(FiscalMode::Fixed);
    let a = townsim::run_simulation(&cfg, &none, 8).unwrap();
    let b = townsim::run_simulation(&cfg, &empty, 8).unwrap();
    assert_eq!(a.days, b.days);
}

#[test]
fn scenario_never_changes_the_town() {
    let cfg = small(2_000);
    let a = Simulation::new(cfg.clone(), ScenarioSchedule::preset("delayed").unwrap(), 6).unwrap();
    let b = Simulation::new(cfg, ScenarioSchedule::empty(10), 6).unwrap();
    assert_eq!(format!("{:?}", a.town()), format!("{:?}", b.town()));
    assert_eq!(a.seeded(), b.seeded());
}

#[test]
fn virus_free_week_has_no_epidemic_events_and_constant_money() {
    let cfg = virus_free(3_000);
    let mut sim = Simulation::new(cfg, ScenarioSchedule::empty(30), 2).unwrap();
    let money = sim.town().total_money();
    for _ in 0..21 {
        sim.step().unwrap();
        let total = sim.town().total_money();
        assert!((total - money).abs() <= 1e-9 * money);
    }
    for r in sim.records() {
        assert_eq!(r.new_infections, 0);
        assert_eq!(r.cum_deaths, 0);
    }
    let last = sim.records().last().unwrap();
    assert!(last.cum_output_lost_pct.abs() < 1e-9);
}

#[test]
fn every_living_agent_is_somewhere() {
    let mut cfg = small(3_000);
    cfg.population.initial_infected_share = 0.02;
    let mut sim = Simulation::new(cfg, ScenarioSchedule::preset("baseline").unwrap(), 3).unwrap();
    for _ in 0..90 {
        sim.step().unwrap();
        let town = sim.town();
        let t = sim.clock().t;
        for a in &town.agents {
            let place = sim.place(a.id);
            if !a.alive {
                assert_eq!(place, NONE);
                continue;
            }
            assert_ne!(place, NONE, "agent {} nowhere at {t}", a.id);
            if a.is_isolated(t) {
                let kind = town.locations[place as usize].kind;
                assert!(
                    place == a.home || kind == LocationKind::Hospital,
                    "isolated agent {} at {kind:?} in period {t}",
                    a.id
                );
            }
        }
        for h in &town.hospitals {
            assert!(h.beds_used <= h.beds && h.icus_used <= h.icus);
        }
    }
}

#[test]
fn wages_only_in_work_phases_and_profits_on_sunday() {
    let cfg = virus_free(3_000);
    let mut sim = Simulation::new(cfg, ScenarioSchedule::empty(10), 5).unwrap();
    // Monday phase 1, then phase 2.
    sim.step().unwrap();
    let bc: Vec<u32> = sim
        .town()
        .agents
        .iter()
        .filter(|a| a.profession == Profession::BlueCollar && a.employed)
        .map(|a| a.id)
        .collect();
    let funds: Vec<f64> = bc
        .iter()
        .map(|&i| sim.town().agents[i as usize].funds)
        .collect();
    sim.step().unwrap();
    assert_eq!(sim.clock().phase(), 2);
    for (k, &i) in bc.iter().enumerate() {
        assert_eq!(sim.town().agents[i as usize].funds, funds[k]);
    }
    while !sim.clock().is_week_end() {
        assert!(sim
            .town()
            .firms
            .iter()
            .all(|f| f.last_profit_rate.is_none()));
        sim.step().unwrap();
    }
    for f in sim
        .town()
        .firms
        .iter()
        .filter(|f| !f.dissolved && !f.employees.is_empty())
    {
        assert!(
            f.last_profit_rate.is_some(),
            "firm {} has no profit rate",
            f.id
        );
        assert_eq!(f.week_sales, 0.0);
        assert_eq!(f.week_costs, 0.0);
        assert_eq!(f.week_guests, 0);
    }
}

#[test]
fn contact_ban_stops_friend_meetings() {
    let mut sim =
        Simulation::new(virus_free(3_000), with_policies(8, &["contact_ban"]), 1).unwrap();
    let mut leisure_phases = 0;
    for _ in 0..21 {
        sim.step().unwrap();
        if sim.last_phase().leisure.thwarts + sim.last_phase().leisure.commercial_visits > 0 {
            leisure_phases += 1;
        }
        assert_eq!(sim.last_phase().leisure.friend_meetings, 0);
    }
    assert!(leisure_phases > 0);
    assert!(sim.records().iter().all(|r| r.friend_meetings == 0));
}

#[test]
fn leisure_closure_empties_facilities_and_sends_staff_home() {
    let mut sim = Simulation::new(
        virus_free(3_000),
        with_policies(8, &["commercial_leisure_closed"]),
        1,
    )
    .unwrap();
    let mut scheduled = 0;
    for _ in 0..21 {
        sim.step().unwrap();
        let s = *sim.last_phase();
        assert_eq!(s.leisure.commercial_visits, 0);
        assert_eq!(s.service_home, s.service_scheduled);
        assert_eq!(s.on_site[Profession::Service.index()], 0);
        scheduled += s.service_scheduled;
    }
    assert!(scheduled > 0);
}

#[test]
fn school_closure_selects_one_caregiver_per_household_with_young_children() {
    let mut sim =
        Simulation::new(virus_free(4_000), with_policies(8, &["schools_closed"]), 1).unwrap();
    sim.step().unwrap();
    let town = sim.town();
    let mut affected = 0;
    for h in &town.households {
        let needs = h
            .members
            .iter()
            .any(|&m| town.agents[m as usize].is_young_child());
        let carers = h
            .members
            .iter()
            .filter(|&&m| town.agents[m as usize].caregiver)
            .count();
        if needs {
            affected += 1;
            assert_eq!(
                carers, 1,
                "household at {} has {carers} caregivers",
                h.location
            );
            assert!(town.agents[h.caregiver as usize].is_adult());
        } else {
            assert_eq!(carers, 0);
        }
    }
    assert!(affected > 0);
    assert_eq!(sim.last_phase().on_site[Profession::Teacher.index()], 0);
    for a in town
        .agents
        .iter()
        .filter(|a| a.profession == Profession::Child)
    {
        assert_ne!(sim.activity(a.id), Activity::School);
    }
}

#[test]
fn caregiver_priority_prefers_non_workers() {
    let mut sim =
        Simulation::new(virus_free(4_000), with_policies(8, &["schools_closed"]), 1).unwrap();
    sim.step().unwrap();
    let town = sim.town();
    for h in town.households.iter().filter(|h| h.caregiver != NONE) {
        let c = &town.agents[h.caregiver as usize];
        // Teachers are free while schools are closed.
        let free = |a: &townsim::town::Agent| {
            matches!(
                a.profession,
                Profession::Pensioner | Profession::Owner | Profession::Teacher
            ) || !a.employed
        };
        let has_free_adult = h.members.iter().any(|&m| {
            let a = &town.agents[m as usize];
            a.is_adult() && free(a)
        });
        if has_free_adult {
            assert!(free(c), "a working caregiver was chosen over a free adult");
        }
        if c.profession == Profession::WhiteCollar && c.employed {
            assert_eq!(sim.activity(c.id), Activity::TeleworkCaregiving);
        }
    }
}

#[test]
fn mandatory_telework_keeps_white_collar_off_site() {
    let mut sim = Simulation::new(
        virus_free(3_000),
        with_policies(8, &["mandatory_telework"]),
        1,
    )
    .unwrap();
    for _ in 0..21 {
        sim.step().unwrap();
        assert_eq!(sim.last_phase().on_site[Profession::WhiteCollar.index()], 0);
    }
    let wc = sim
        .town()
        .agents
        .iter()
        .find(|a| a.profession == Profession::WhiteCollar && a.employed)
        .map(|a| a.id)
        .unwrap();
    while sim.clock().phase() != 1 || !sim.clock().is_weekday() {
        sim.step().unwrap();
    }
    assert_eq!(sim.activity(wc), Activity::Telework);
}

#[test]
fn lifting_restores_default_parameters() {
    let text = "name = \"lift\"\nhorizon_days = 6\nlift_all_day = 3\n[[events]]\nday = 0\nactivate = [\"social_distancing\", \"contact_ban\"]\n";
    let schedule = ScenarioSchedule::from_toml_str(text).unwrap();
    let cfg = small(1_500);
    let mut sim = Simulation::new(cfg.clone(), schedule, 1).unwrap();
    sim.run_until_day(2).unwrap();
    sim.step().unwrap();
    assert_eq!(
        sim.policy().contacts(cfg.epidemic.contacts, &cfg.epidemic),
        5
    );
    sim.run_until_day(3).unwrap();
    sim.step().unwrap();
    let p = sim.policy();
    assert_eq!(p.contacts(cfg.epidemic.contacts, &cfg.epidemic), 10);
    assert_eq!(p.home_multiplier(&cfg.epidemic), 1.0);
    assert!(p.active().is_empty());
}
