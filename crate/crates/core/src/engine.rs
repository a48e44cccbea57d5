//! The period loop: disease progress, policies, presence, payments,
//! movement, production, transmission, markets and the money audit.

use crate::clock::{window_slot, Clock};
use crate::config::TownConfig;
use crate::economy::{self, SetupReport};
use crate::epidemic::seed_infection;
use crate::error::SimError;
use crate::metrics::{DayRecord, RunMetrics};
use crate::policy::{PolicySet, ScenarioSchedule};
use crate::rng::{RngStreams, SimRng};
use crate::social::{activity_of, Activity, LeisureTally, MatchState, PlanTarget};
use crate::synth::synthesize;
use crate::town::Town;
use crate::types::{AgentId, FiscalMode, InfectionSource, LocationId, Profession, NONE};

/// Relative tolerance of the per-period money audit.
pub const MONEY_TOLERANCE: f64 = 1e-9;

/// Per-period scratch state: activities, places, occupancy and plans.
#[derive(Debug, Clone, Default)]
pub struct PhaseState {
    pub activity: Vec<Activity>,
    pub place: Vec<LocationId>,
    pub guests: Vec<u32>,
    pub match_state: Vec<MatchState>,
    pub planners: Vec<AgentId>,
    pub plan_offsets: Vec<u32>,
    pub plans: Vec<PlanTarget>,
    occ_start: Vec<u32>,
    occ_ids: Vec<AgentId>,
}

impl PhaseState {
    fn new(agents: usize, locations: usize) -> Self {
        PhaseState {
            activity: vec![Activity::Absent; agents],
            place: vec![NONE; agents],
            guests: vec![0; locations],
            match_state: vec![MatchState::Unresolved; agents],
            occ_start: vec![0; locations + 1],
            ..Default::default()
        }
    }

    /// Entry `k` of planner number `i`.
    pub fn plan_entry(&self, i: usize, k: usize) -> Option<PlanTarget> {
        let start = self.plan_offsets[i] as usize;
        let end = self.plan_offsets[i + 1] as usize;
        (start + k < end).then(|| self.plans[start + k])
    }

    /// Agents at `loc`, in increasing id order.
    pub fn occupants(&self, loc: LocationId) -> &[AgentId] {
        let l = loc as usize;
        &self.occ_ids[self.occ_start[l] as usize..self.occ_start[l + 1] as usize]
    }

    fn build_occupancy(&mut self) {
        let locations = self.occ_start.len() - 1;
        self.occ_start.iter_mut().for_each(|c| *c = 0);
        for &p in &self.place {
            if p != NONE {
                self.occ_start[p as usize + 1] += 1;
            }
        }
        for l in 0..locations {
            self.occ_start[l + 1] += self.occ_start[l];
        }
        self.occ_ids.resize(self.occ_start[locations] as usize, 0);
        let mut cursor: Vec<u32> = self.occ_start[..locations].to_vec();
        for (id, &p) in self.place.iter().enumerate() {
            if p != NONE {
                let c = &mut cursor[p as usize];
                self.occ_ids[*c as usize] = id as AgentId;
                *c += 1;
            }
        }
    }
}

/// Counts accumulated over one day.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DayCounters {
    pub new_infections: u64,
    pub new_detected: u64,
    pub by_source: [u64; 8],
    pub deaths: u64,
    pub thwarts: u64,
    pub friend_meetings: u64,
    pub commercial_visits: u64,
    pub output: f64,
    pub goods_price: Option<f64>,
    pub purchase: f64,
}

impl DayCounters {
    pub fn record_infection(&mut self, source: InfectionSource, detected: bool) {
        self.new_infections += 1;
        if detected {
            self.new_detected += 1;
        }
        self.by_source[source as usize] += 1;
    }
}

/// Tallies of the most recent period, for inspection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub t: u32,
    pub leisure: LeisureTally,
    /// Agents on site at their workplace, by profession index.
    pub on_site: [u32; 8],
    /// Employed service workers with a shift this period who stayed home
    /// on benefit.
    pub service_home: u32,
    pub service_scheduled: u32,
}

/// A running simulation of one town under one scenario.
pub struct Simulation {
    pub(crate) cfg: TownConfig,
    pub(crate) town: Town,
    pub(crate) schedule: ScenarioSchedule,
    pub(crate) policy: PolicySet,
    pub(crate) t: u32,
    pub(crate) rng: SimRng,
    pub(crate) phase: PhaseState,
    pub(crate) active: Vec<AgentId>,
    pub(crate) counters: DayCounters,
    seed: u64,
    setup: SetupReport,
    money: f64,
    totals: DayCounters,
    cum_output: f64,
    working_days: u32,
    stats: PhaseStats,
    records: Vec<DayRecord>,
    elimination_day: Option<u32>,
    seeded: Vec<AgentId>,
}

impl Simulation {
    /// Synthesize the town, calibrate the economy, run the setup period
    /// and seed the infection.
    pub fn new(cfg: TownConfig, schedule: ScenarioSchedule, seed: u64) -> Result<Self, SimError> {
        cfg.validate().map_err(crate::error::SetupError::from)?;
        let RngStreams {
            setup: mut setup_rng,
            dynamics,
        } = RngStreams::new(seed);
        let mut town = synthesize(&cfg, &mut setup_rng)?;
        let setup = economy::init_economy(&mut town, &cfg)?;
        let seeded = seed_infection(
            &mut town,
            &cfg,
            cfg.population.initial_infected_share,
            &mut setup_rng,
        );
        let phase = PhaseState::new(town.agents.len(), town.locations.len());
        let mut sim = Simulation {
            money: setup.money_before,
            cfg,
            town,
            schedule,
            policy: PolicySet::default(),
            t: 0,
            rng: dynamics,
            phase,
            active: seeded.clone(),
            counters: DayCounters::default(),
            seed,
            setup,
            totals: DayCounters::default(),
            cum_output: 0.0,
            working_days: 0,
            stats: PhaseStats::default(),
            records: Vec::new(),
            elimination_day: None,
            seeded,
        };
        for _ in 0..sim.seeded.len() {
            sim.counters.record_infection(InfectionSource::Seed, false);
        }
        for i in 0..sim.seeded.len() {
            let id = sim.seeded[i];
            if sim.town.agents[id as usize].disease.detected {
                sim.counters.new_detected += 1;
            }
        }
        sim.audit()?;
        sim.close_day();
        Ok(sim)
    }

    pub fn town(&self) -> &Town {
        &self.town
    }

    pub fn config(&self) -> &TownConfig {
        &self.cfg
    }

    pub fn policy(&self) -> PolicySet {
        self.policy
    }

    pub fn clock(&self) -> Clock {
        Clock::new(self.t)
    }

    pub fn setup_report(&self) -> &SetupReport {
        &self.setup
    }

    pub fn records(&self) -> &[DayRecord] {
        &self.records
    }

    pub fn last_phase(&self) -> &PhaseStats {
        &self.stats
    }

    pub fn activity(&self, id: AgentId) -> Activity {
        self.phase.activity[id as usize]
    }

    pub fn place(&self, id: AgentId) -> LocationId {
        self.phase.place[id as usize]
    }

    /// Agents seeded with the infection at period 0.
    pub fn seeded(&self) -> &[AgentId] {
        &self.seeded
    }

    /// Agents currently exposed or infectious.
    pub fn active_infections(&self) -> usize {
        self.active.len()
    }

    pub fn horizon_periods(&self) -> u32 {
        self.schedule.horizon_days * 3
    }

    pub fn fiscal(&self) -> FiscalMode {
        self.schedule.fiscal
    }

    /// Run one period.
    pub fn step(&mut self) -> Result<(), SimError> {
        self.t += 1;
        let clock = Clock::new(self.t);
        let slot = window_slot(self.t);
        for w in self.town.income.iter_mut() {
            w[slot] = 0.0;
        }

        self.progress_disease();

        if clock.phase() == 1 {
            self.schedule.apply_day(clock.day(), &mut self.policy);
            if self.policy.schools_closed {
                self.select_caregivers();
            } else {
                self.clear_caregivers();
            }
        }

        for id in 0..self.town.agents.len() as AgentId {
            self.phase.activity[id as usize] = activity_of(&self.town, &self.policy, id, clock);
        }

        self.pay(clock, slot);
        self.stats = PhaseStats {
            t: self.t,
            ..Default::default()
        };
        self.move_agents(clock);

        if clock.is_work_phase() {
            let y = economy::produce(&mut self.town, &self.cfg.economy, &self.phase.activity);
            self.counters.output += y;
            self.cum_output += y;
            self.working_days += 1;
        }

        self.phase.build_occupancy();
        self.transmit();

        if clock.is_consumption_phase() {
            let purchase = economy::government_purchase(
                self.schedule.fiscal,
                self.town.government.g0,
                self.town.government.savings,
            );
            let market = economy::clear_goods_market(&mut self.town, &self.cfg.economy, purchase);
            if market.price.is_none() {
                log::debug!("period {}: no goods supplied, market skipped", self.t);
            }
            self.counters.goods_price = market.price;
            self.counters.purchase = market.purchase;
            economy::collect_rents(&mut self.town, &self.cfg.economy, Some(slot));
        }
        if clock.is_week_end() {
            economy::weekly_update(&mut self.town, &self.cfg, &mut self.rng);
        }
        self.audit()?;
        if clock.phase() == 3 {
            self.close_day();
        }
        Ok(())
    }

    /// Run until the end of day `day` (exclusive), i.e. until the record
    /// for `day` exists.
    pub fn run_until_day(&mut self, day: u32) -> Result<(), SimError> {
        while (self.records.len() as u32) <= day {
            self.step()?;
        }
        Ok(())
    }

    /// Run to the scenario horizon and return the metrics.
    pub fn run(mut self) -> Result<RunMetrics, SimError> {
        self.run_until_day(self.schedule.horizon_days)?;
        Ok(self.into_metrics())
    }

    pub fn into_metrics(self) -> RunMetrics {
        RunMetrics {
            seed: self.seed,
            scenario: self.schedule.name.clone(),
            fiscal: self.schedule.fiscal,
            horizon_days: self.schedule.horizon_days,
            population: self.town.agents.len(),
            setup_output: self.setup.output,
            initial_unemployment: self.setup.initial_unemployment,
            initial_leisure_savings: self.setup.leisure_savings,
            elimination_day: self.elimination_day,
            days: self.records,
        }
    }

    fn pay(&mut self, clock: Clock, slot: usize) {
        let regular = clock.is_work_phase();
        let week_slot = clock.week_slot();
        let mut gov = 0.0;
        for id in 0..self.town.agents.len() as AgentId {
            let a = &self.town.agents[id as usize];
            if !a.alive {
                continue;
            }
            let due = if a.employed && a.profession.works_shifts() {
                a.works_shift_in(week_slot)
            } else {
                regular
            };
            if !due {
                continue;
            }
            let act = self.phase.activity[id as usize];
            if let Some(pay) = economy::pay_for(&self.town, &self.cfg, id, act) {
                economy::execute_pay(&mut self.town, &self.cfg, id, pay, Some(slot), &mut gov);
            }
        }
        self.town.government.savings += gov;
    }

    fn move_agents(&mut self, clock: Clock) {
        let mut any_leisure = false;
        for id in 0..self.town.agents.len() {
            let a = &self.town.agents[id];
            let act = self.phase.activity[id];
            self.phase.place[id] = match act {
                Activity::Absent => NONE,
                Activity::Hospital => {
                    let h = a.disease.hospital;
                    if h == NONE {
                        a.home
                    } else {
                        self.town.hospitals[h as usize].location
                    }
                }
                Activity::OnSite => {
                    self.stats.on_site[a.profession.index()] += 1;
                    a.workplace
                }
                Activity::School => {
                    let c = a.class as usize;
                    self.town.schools[self.town.classes[c].school as usize].location
                }
                Activity::Leisure => {
                    any_leisure = true;
                    NONE
                }
                _ => a.home,
            };
            if a.profession == Profession::Service
                && a.employed
                && a.works_shift_in(clock.week_slot())
            {
                self.stats.service_scheduled += 1;
                if act == Activity::HomeBenefit {
                    self.stats.service_home += 1;
                }
            }
        }
        self.phase.guests.iter_mut().for_each(|g| *g = 0);
        if any_leisure {
            let tally = self.run_leisure();
            self.stats.leisure = tally;
            self.counters.thwarts += tally.thwarts;
            self.counters.friend_meetings += tally.friend_meetings;
            self.counters.commercial_visits += tally.commercial_visits;
        }
    }

    fn audit(&self) -> Result<(), SimError> {
        let total = self.town.total_money();
        if (total - self.money).abs() > MONEY_TOLERANCE * self.money.abs().max(1.0) {
            return Err(SimError::MoneyDrift {
                period: self.t,
                total,
                expected: self.money,
            });
        }
        Ok(())
    }

    fn close_day(&mut self) {
        let day = self.records.len() as u32;
        let c = self.counters;
        self.totals.new_infections += c.new_infections;
        self.totals.new_detected += c.new_detected;
        self.totals.deaths += c.deaths;
        let active = self.active.len();
        if active == 0 && self.elimination_day.is_none() {
            self.elimination_day = Some(day);
        }
        let (mut hospital, mut icu) = (0u32, 0u32);
        for h in &self.town.hospitals {
            hospital += h.beds_used;
            icu += h.icus_used;
        }
        let expected = self.setup.output * self.working_days as f64;
        let lost = if expected > 0.0 {
            100.0 * (expected - self.cum_output) / expected
        } else {
            0.0
        };
        let mut inf_by_source = [0u64; 7];
        for (k, s) in InfectionSource::REPORTED.iter().enumerate() {
            inf_by_source[k] = c.by_source[*s as usize];
        }
        let commercial: Vec<f64> = self
            .town
            .firms
            .iter()
            .filter(|f| f.kind == crate::town::FirmKind::Commercial && !f.dissolved)
            .map(|f| f.price)
            .collect();
        self.records.push(DayRecord {
            day,
            new_infections: c.new_infections,
            new_detected: c.new_detected,
            cum_infections: self.totals.new_infections,
            cum_detected: self.totals.new_detected,
            cum_deaths: self.totals.deaths,
            active_infections: active as u64,
            hospital,
            icu,
            output: c.output,
            cum_output_lost_pct: lost,
            unemployment_rate: self.town.private_unemployment_rate(),
            thwarts: c.thwarts,
            friend_meetings: c.friend_meetings,
            commercial_visits: c.commercial_visits,
            gov_savings: self.town.government.savings,
            gov_purchase: c.purchase,
            goods_price: c.goods_price.unwrap_or(0.0),
            leisure_savings: self.town.total_leisure_savings(),
            mean_leisure_price: if commercial.is_empty() {
                0.0
            } else {
                commercial.iter().sum::<f64>() / commercial.len() as f64
            },
            inf_by_source,
        });
        self.counters = DayCounters::default();
    }
}
