//! Disease courses, transmission, hospital capacity and deaths.

use rand::seq::index::sample;
use rand::Rng;

use crate::config::{AgeGroupRow, EpidemicConfig, TimelineConfig, TownConfig};
use crate::engine::Simulation;
use crate::policy::PolicySet;
use crate::rng::SimRng;
use crate::social::{LeisureLadder, PlanTarget};
use crate::town::Town;
use crate::types::{AgentId, InfectionSource, LocationKind, Profession, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiseaseState {
    #[default]
    Susceptible,
    Exposed,
    InfectiousPresymptomatic,
    SymptomaticMild,
    SymptomaticPreHospital,
    HospitalSevere,
    Icu,
    PostIcuBed,
    /// Severe case that found no hospital bed and survives at home.
    SevereAtHome,
    /// Leaving intensive care without a free regular bed.
    PostIcuAtHome,
    Recovered,
    Dead,
}

impl DiseaseState {
    pub fn is_hospitalized(self) -> bool {
        matches!(
            self,
            DiseaseState::HospitalSevere | DiseaseState::Icu | DiseaseState::PostIcuBed
        )
    }

    /// Infected and not yet recovered or dead.
    pub fn is_active(self) -> bool {
        !matches!(
            self,
            DiseaseState::Susceptible | DiseaseState::Recovered | DiseaseState::Dead
        )
    }

    pub fn is_infectious(self) -> bool {
        self.is_active() && self != DiseaseState::Exposed
    }

    pub fn is_symptomatic(self) -> bool {
        matches!(
            self,
            DiseaseState::SymptomaticMild
                | DiseaseState::SymptomaticPreHospital
                | DiseaseState::SevereAtHome
                | DiseaseState::PostIcuAtHome
        ) || self.is_hospitalized()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Course {
    #[default]
    Mild,
    SevereSurvive,
    SevereDie,
    CriticalSurvive,
    CriticalDie,
}

impl Course {
    pub fn is_hospital_course(self) -> bool {
        self != Course::Mild
    }

    pub fn is_critical(self) -> bool {
        matches!(self, Course::CriticalSurvive | Course::CriticalDie)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiseaseRecord {
    pub state: DiseaseState,
    pub severity: f64,
    pub course: Course,
    pub t_infected: u32,
    pub detected: bool,
    pub unable_to_work: bool,
    /// Hospital index while occupying a bed or an ICU.
    pub hospital: u32,
}

impl DiseaseRecord {
    pub fn is_susceptible(&self) -> bool {
        self.state == DiseaseState::Susceptible
    }

    /// Too sick to work or go out.
    pub fn keeps_home(&self) -> bool {
        self.unable_to_work && self.state.is_symptomatic() && !self.state.is_hospitalized()
    }
}

/// Severity thresholds of one age group. A draw below `hospital` is mild;
/// draws at or above `critical` need intensive care.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CourseBands {
    pub hospital: f64,
    pub severe_death: f64,
    pub critical: f64,
    pub critical_death: f64,
}

impl CourseBands {
    pub fn new(row: &AgeGroupRow, icu_death_share: f64) -> Self {
        let (r1, r2, r3) = (row.hospitalized, row.critical, row.severe_death);
        CourseBands {
            hospital: 1.0 - r1,
            severe_death: 1.0 - r1 * r2 - r1 * (1.0 - r2) * r3,
            critical: 1.0 - r1 * r2,
            critical_death: 1.0 - icu_death_share * r1 * r2,
        }
    }

    pub fn course(&self, sigma: f64) -> Course {
        if sigma < self.hospital {
            Course::Mild
        } else if sigma >= self.critical {
            if sigma >= self.critical_death {
                Course::CriticalDie
            } else {
                Course::CriticalSurvive
            }
        } else if sigma >= self.severe_death {
            Course::SevereDie
        } else {
            Course::SevereSurvive
        }
    }

    /// Whether a severe case without a bed dies: the top `share` of the
    /// severe band does.
    pub fn dies_without_bed(&self, sigma: f64, share: f64) -> bool {
        sigma >= self.hospital + (1.0 - share) * (self.critical - self.hospital)
    }
}

pub fn assign_course(sigma: f64, row: &AgeGroupRow, icu_death_share: f64) -> Course {
    CourseBands::new(row, icu_death_share).course(sigma)
}

/// Transition times of one infection, in periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timeline {
    pub infectious: u32,
    pub symptoms: u32,
    pub admission: Option<u32>,
    pub icu_exit: Option<u32>,
    /// Recovery or death.
    pub end: u32,
}

pub fn schedule_timeline(course: Course, t_infected: u32, tl: &TimelineConfig) -> Timeline {
    let symptoms = t_infected + tl.incubation;
    let admission = course
        .is_hospital_course()
        .then_some(symptoms + tl.until_admission);
    let end = symptoms
        + match course {
            Course::Mild => tl.mild_recovery,
            Course::SevereSurvive => tl.severe_recovery,
            Course::SevereDie => tl.severe_death,
            Course::CriticalSurvive => tl.critical_recovery,
            Course::CriticalDie => tl.critical_death,
        };
    let icu_exit = (course == Course::CriticalSurvive).then_some(symptoms + tl.critical_icu_stay);
    Timeline {
        infectious: t_infected + tl.latent,
        symptoms,
        admission,
        icu_exit,
        end,
    }
}

/// Per-contact infection probability at a location.
pub fn infection_probability(
    kind: LocationKind,
    occupants: usize,
    ep: &EpidemicConfig,
    policy: &PolicySet,
) -> f64 {
    let crowding = match kind {
        LocationKind::Commercial => occupants as f64 / ep.commercial_standard_capacity,
        LocationKind::NonCommercial => occupants as f64 / ep.noncommercial_standard_capacity,
        _ => 1.0,
    };
    let hygiene = if kind == LocationKind::Hospital {
        policy.hospital_hygiene(ep)
    } else {
        1.0
    };
    (ep.beta * crowding * hygiene).clamp(0.0, 1.0)
}

/// Uniform sample without replacement of up to `gamma` occupants other than
/// the one at `self_pos`.
pub fn draw_contacts(
    occupants: &[AgentId],
    self_pos: usize,
    gamma: usize,
    rng: &mut SimRng,
    out: &mut Vec<AgentId>,
) {
    out.clear();
    let others = occupants.len().saturating_sub(1);
    if others == 0 || gamma == 0 {
        return;
    }
    if gamma >= others {
        out.extend(
            occupants
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != self_pos)
                .map(|(_, &a)| a),
        );
        return;
    }
    for i in sample(rng, others, gamma).into_iter() {
        let i = if i >= self_pos { i + 1 } else { i };
        out.push(occupants[i]);
    }
}

/// School contacts: `gamma - 1` classmates and one other person at the school.
pub fn draw_school_contacts(
    occupants: &[AgentId],
    self_pos: usize,
    classmates: &[AgentId],
    gamma: usize,
    rng: &mut SimRng,
    out: &mut Vec<AgentId>,
) {
    out.clear();
    if gamma == 0 {
        return;
    }
    let k = (gamma - 1).min(classmates.len());
    if k == classmates.len() {
        out.extend_from_slice(classmates);
    } else {
        for i in sample(rng, classmates.len(), k).into_iter() {
            out.push(classmates[i]);
        }
    }
    let others = occupants.len().saturating_sub(1);
    if others == 0 {
        return;
    }
    for _ in 0..8 {
        let i = rng.random_range(0..others);
        let i = if i >= self_pos { i + 1 } else { i };
        let pick = occupants[i];
        if !out.contains(&pick) {
            out.push(pick);
            return;
        }
    }
}

impl Simulation {
    /// Infect a susceptible agent at period `t`.
    pub(crate) fn infect(&mut self, id: AgentId, t: u32, source: InfectionSource) {
        let sigma: f64 = self.rng.random();
        infect_with(&mut self.town, &self.cfg, id, t, sigma);
        self.active.push(id);
        self.counters
            .record_infection(source, self.town.agents[id as usize].disease.detected);
    }

    /// Fire all disease transitions due in the current period.
    pub(crate) fn progress_disease(&mut self) {
        let t = self.t;
        let active = std::mem::take(&mut self.active);
        let mut still = Vec::with_capacity(active.len());
        for id in active {
            self.advance(id, t);
            if self.town.agents[id as usize].disease.state.is_active() {
                still.push(id);
            }
        }
        // Agents infected by a death-triggered relocation cannot appear here,
        // but keep any pushed while advancing.
        still.append(&mut self.active);
        self.active = still;
    }

    fn advance(&mut self, id: AgentId, t: u32) {
        let rec = self.town.agents[id as usize].disease;
        let tl = schedule_timeline(rec.course, rec.t_infected, &self.cfg.timeline);
        let mut state = rec.state;
        if state == DiseaseState::Exposed && t >= tl.infectious {
            state = DiseaseState::InfectiousPresymptomatic;
            self.town.agents[id as usize].disease.state = state;
        }
        if state == DiseaseState::InfectiousPresymptomatic && t >= tl.symptoms {
            state = if rec.course == Course::Mild {
                DiseaseState::SymptomaticMild
            } else {
                DiseaseState::SymptomaticPreHospital
            };
            self.town.agents[id as usize].disease.state = state;
            if rec.detected {
                self.on_detection(id, t, tl.end);
            }
        }
        if let Some(adm) = tl.admission {
            if state == DiseaseState::SymptomaticPreHospital && t >= adm {
                if !self.admit(id, rec) {
                    return;
                }
                state = self.town.agents[id as usize].disease.state;
            }
        }
        if let Some(exit) = tl.icu_exit {
            if state == DiseaseState::Icu && t >= exit {
                let h = self.town.agents[id as usize].disease.hospital as usize;
                self.town.hospitals[h].icus_used -= 1;
                state = match self.free_hospital(false) {
                    Some(h2) => {
                        self.town.hospitals[h2].beds_used += 1;
                        self.town.agents[id as usize].disease.hospital = h2 as u32;
                        DiseaseState::PostIcuBed
                    }
                    None => {
                        self.town.agents[id as usize].disease.hospital = NONE;
                        DiseaseState::PostIcuAtHome
                    }
                };
                self.town.agents[id as usize].disease.state = state;
            }
        }
        if t >= tl.end && state.is_active() && state != DiseaseState::Exposed {
            let dies = matches!(rec.course, Course::SevereDie | Course::CriticalDie);
            self.release_capacity(id);
            if dies {
                self.kill(id);
            } else {
                self.town.agents[id as usize].disease.state = DiseaseState::Recovered;
            }
        }
    }

    /// Hospital admission. Returns false when the agent died.
    fn admit(&mut self, id: AgentId, rec: DiseaseRecord) -> bool {
        let critical = rec.course.is_critical();
        match self.free_hospital(critical) {
            Some(h) => {
                let hosp = &mut self.town.hospitals[h];
                if critical {
                    hosp.icus_used += 1;
                } else {
                    hosp.beds_used += 1;
                }
                let d = &mut self.town.agents[id as usize].disease;
                d.hospital = h as u32;
                d.state = if critical {
                    DiseaseState::Icu
                } else {
                    DiseaseState::HospitalSevere
                };
                true
            }
            None => {
                let row = &self.cfg.age_groups[self.town.agents[id as usize].age_group as usize];
                let bands = CourseBands::new(row, self.cfg.epidemic.icu_death_share);
                let dies = critical
                    || bands.dies_without_bed(
                        rec.severity,
                        self.cfg.epidemic.severe_no_bed_death_share,
                    );
                if dies {
                    self.kill(id);
                    false
                } else {
                    self.town.agents[id as usize].disease.state = DiseaseState::SevereAtHome;
                    true
                }
            }
        }
    }

    /// Hospital with the most free beds (or ICUs), lowest index on ties.
    fn free_hospital(&self, icu: bool) -> Option<usize> {
        let mut best: Option<(usize, u32)> = None;
        for (i, h) in self.town.hospitals.iter().enumerate() {
            let free = if icu {
                h.icus - h.icus_used
            } else {
                h.beds - h.beds_used
            };
            if free > 0 && best.is_none_or(|(_, f)| free > f) {
                best = Some((i, free));
            }
        }
        best.map(|(i, _)| i)
    }

    fn release_capacity(&mut self, id: AgentId) {
        let d = self.town.agents[id as usize].disease;
        if d.hospital == NONE {
            return;
        }
        let h = &mut self.town.hospitals[d.hospital as usize];
        match d.state {
            DiseaseState::Icu => h.icus_used -= 1,
            DiseaseState::HospitalSevere | DiseaseState::PostIcuBed => h.beds_used -= 1,
            _ => {}
        }
        self.town.agents[id as usize].disease.hospital = NONE;
    }

    fn on_detection(&mut self, id: AgentId, t: u32, infection_end: u32) {
        let policy = self.policy;
        if policy.case_isolation {
            let a = &mut self.town.agents[id as usize];
            a.isolated_until = a.isolated_until.max(infection_end);
        }
        let until = t + self.cfg.epidemic.contact_isolation_periods;
        if policy.family_isolation {
            let hh = self.town.agents[id as usize].household;
            if hh != NONE {
                let members = self.town.households[hh as usize].members.clone();
                for m in members {
                    if m != id {
                        let a = &mut self.town.agents[m as usize];
                        a.isolated_until = a.isolated_until.max(until);
                    }
                }
            }
        }
        if policy.workplace_isolation {
            let a = &self.town.agents[id as usize];
            if a.employed && a.profession.is_private() && a.employer != NONE {
                let coworkers = self.town.firms[a.employer as usize].employees.clone();
                for m in coworkers {
                    if m != id {
                        let a = &mut self.town.agents[m as usize];
                        a.isolated_until = a.isolated_until.max(until);
                    }
                }
            }
        }
    }

    fn kill(&mut self, id: AgentId) {
        self.release_capacity(id);
        self.town.agents[id as usize].disease.state = DiseaseState::Dead;
        self.counters.deaths += 1;
        resolve_death(&mut self.town, id, &mut self.rng);
    }

    /// Contacts and infections at every occupied location.
    pub(crate) fn transmit(&mut self) {
        let t = self.t;
        let gamma = self
            .policy
            .contacts(self.cfg.epidemic.contacts, &self.cfg.epidemic) as usize;
        let mut spreaders: Vec<AgentId> = self
            .active
            .iter()
            .copied()
            .filter(|&id| {
                let a = &self.town.agents[id as usize];
                a.alive && a.disease.state.is_infectious() && self.phase.place[id as usize] != NONE
            })
            .collect();
        spreaders.sort_unstable();
        let mut contacts = Vec::with_capacity(16);
        let mut classmates = Vec::new();
        for id in spreaders {
            let loc = self.phase.place[id as usize];
            let occupants = self.phase.occupants(loc);
            if occupants.len() < 2 {
                continue;
            }
            let self_pos = occupants
                .iter()
                .position(|&o| o == id)
                .expect("spreader is present");
            let kind = self.town.locations[loc as usize].kind;
            let me = &self.town.agents[id as usize];
            if kind == LocationKind::School
                && me.profession == Profession::Child
                && me.class != NONE
            {
                classmates.clear();
                classmates.extend(
                    occupants
                        .iter()
                        .copied()
                        .filter(|&o| o != id && self.town.agents[o as usize].class == me.class),
                );
                draw_school_contacts(
                    occupants,
                    self_pos,
                    &classmates,
                    gamma,
                    &mut self.rng,
                    &mut contacts,
                );
            } else {
                draw_contacts(occupants, self_pos, gamma, &mut self.rng, &mut contacts);
            }
            let p = infection_probability(kind, occupants.len(), &self.cfg.epidemic, &self.policy);
            let source = InfectionSource::of(kind);
            for &c in &contacts {
                if self.town.agents[c as usize].disease.is_susceptible()
                    && self.rng.random::<f64>() < p
                {
                    self.infect(c, t, source);
                }
            }
        }
    }
}

/// Set an agent's infection record with a given severity draw.
pub fn infect_with(town: &mut Town, cfg: &TownConfig, id: AgentId, t: u32, sigma: f64) {
    let a = &mut town.agents[id as usize];
    let row = &cfg.age_groups[a.age_group as usize];
    a.disease = DiseaseRecord {
        state: DiseaseState::Exposed,
        severity: sigma,
        course: assign_course(sigma, row, cfg.epidemic.icu_death_share),
        t_infected: t,
        detected: sigma >= cfg.epidemic.detection_threshold,
        unable_to_work: sigma >= cfg.epidemic.unable_to_work_threshold,
        hospital: NONE,
    };
}

/// Expose `round(fraction * population)` distinct agents at period 0.
pub fn seed_infection(
    town: &mut Town,
    cfg: &TownConfig,
    fraction: f64,
    rng: &mut SimRng,
) -> Vec<AgentId> {
    let n = town.agents.len();
    let k = ((fraction.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
    let mut chosen: Vec<AgentId> = sample(rng, n, k)
        .into_iter()
        .map(|i| i as AgentId)
        .collect();
    chosen.sort_unstable();
    for &id in &chosen {
        let sigma: f64 = rng.random();
        infect_with(town, cfg, id, 0, sigma);
    }
    chosen
}

fn random_living_adult(town: &Town, exclude: AgentId, rng: &mut SimRng) -> Option<AgentId> {
    let n = town.agents.len();
    if n == 0 {
        return None;
    }
    for _ in 0..64 {
        let i = rng.random_range(0..n);
        let a = &town.agents[i];
        if a.alive && a.is_adult() && a.id != exclude {
            return Some(a.id);
        }
    }
    let candidates: Vec<AgentId> = town
        .agents
        .iter()
        .filter(|a| a.alive && a.is_adult() && a.id != exclude)
        .map(|a| a.id)
        .collect();
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())])
    }
}

fn random_household_with_adult(town: &Town, exclude: u32, rng: &mut SimRng) -> Option<u32> {
    let has_adult = |h: usize| {
        h as u32 != exclude
            && town.households[h].members.iter().any(|&m| {
                let a = &town.agents[m as usize];
                a.alive && a.is_adult()
            })
    };
    let n = town.households.len();
    if n == 0 {
        return None;
    }
    for _ in 0..256 {
        let h = rng.random_range(0..n);
        if has_adult(h) {
            return Some(h as u32);
        }
    }
    let candidates: Vec<usize> = (0..n).filter(|&h| has_adult(h)).collect();
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())] as u32)
    }
}

/// Inheritance, guardianship and removal of a dead agent from all rosters.
/// The agent must already be marked dead in its disease record.
pub fn resolve_death(town: &mut Town, id: AgentId, rng: &mut SimRng) {
    let idx = id as usize;
    town.agents[idx].alive = false;
    town.agents[idx].disease.state = DiseaseState::Dead;
    town.agents[idx].caregiver = false;

    let estate = town.agents[idx].funds + town.agents[idx].leisure_savings;
    town.agents[idx].funds = 0.0;
    town.agents[idx].leisure_savings = 0.0;
    let heir = random_living_adult(town, id, rng);
    match heir {
        Some(h) => town.agents[h as usize].funds += estate,
        None => town.government.savings += estate,
    }
    let new_owner = heir.unwrap_or(NONE);
    for f in town.firms.iter_mut().filter(|f| f.owner == id) {
        f.owner = new_owner;
    }

    let (employer, profession, workplace) = {
        let a = &town.agents[idx];
        (a.employer, a.profession, a.workplace)
    };
    if employer != NONE {
        let firm = &mut town.firms[employer as usize];
        firm.employees.retain(|&e| e != id);
        if profession == Profession::Service {
            crate::synth::schedule_service_shifts(town, employer);
        }
    }
    if town.agents[idx].employed && workplace != NONE {
        let loc = &town.locations[workplace as usize];
        match (profession, loc.kind) {
            (Profession::Health, LocationKind::Hospital) => town.hospitals[loc.index as usize]
                .staff
                .retain(|&e| e != id),
            (Profession::Teacher, LocationKind::School) => town.schools[loc.index as usize]
                .teachers
                .retain(|&e| e != id),
            _ => {}
        }
    }
    for pool in town.unemployed.iter_mut() {
        pool.remove(id);
    }
    let class = town.agents[idx].class;
    if class != NONE {
        town.classes[class as usize].members.retain(|&m| m != id);
    }

    let hh = town.agents[idx].household;
    if hh != NONE {
        let household = &mut town.households[hh as usize];
        household.members.retain(|&m| m != id);
        if household.caregiver == id {
            household.caregiver = NONE;
        }
        let members = household.members.clone();
        let has_adult = members.iter().any(|&m| town.agents[m as usize].is_adult());
        let children: Vec<AgentId> = members
            .iter()
            .copied()
            .filter(|&m| town.agents[m as usize].profession == Profession::Child)
            .collect();
        if !has_adult && !children.is_empty() {
            if let Some(target) = random_household_with_adult(town, hh, rng) {
                let loc = town.households[target as usize].location;
                town.households[hh as usize]
                    .members
                    .retain(|m| !children.contains(m));
                for c in children {
                    let a = &mut town.agents[c as usize];
                    a.household = target;
                    a.home = loc;
                    town.households[target as usize].members.push(c);
                }
            }
        }
    } else if town.agents[idx].home != NONE {
        let loc = &town.locations[town.agents[idx].home as usize];
        if loc.kind == LocationKind::RetirementHome {
            town.retirement_homes[loc.index as usize]
                .residents
                .retain(|&m| m != id);
        }
    }

    let friends = std::mem::take(&mut town.friends[idx]);
    for (f, _) in friends {
        town.friends[f as usize].retain(|&(x, _)| x != id);
        town.ladders[f as usize].remove(PlanTarget::Friend(id));
    }
    town.ladders[idx] = LeisureLadder::default();
}
