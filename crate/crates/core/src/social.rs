//! Presence, leisure plans and matching, isolation and caregivers.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::clock::Clock;
use crate::config::LeisureConfig;
use crate::engine::Simulation;
use crate::policy::PolicySet;
use crate::rng::SimRng;
use crate::town::{Location, Town};
use crate::types::{AgentId, LocationId, LocationKind, Profession, NONE};

/// What an agent does in a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activity {
    #[default]
    Absent,
    Hospital,
    HomeSick,
    HomeIsolated,
    HomeCaregiving,
    /// Scheduled shift at a facility closed by policy.
    HomeBenefit,
    OnSite,
    Telework,
    TeleworkCaregiving,
    School,
    Leisure,
    Home,
}

impl Activity {
    /// Employed and producing (on site or at home).
    pub fn is_working(self) -> bool {
        matches!(
            self,
            Activity::OnSite | Activity::Telework | Activity::TeleworkCaregiving
        )
    }
}

/// Activity of agent `id` in the period given by `clock`.
pub fn activity_of(town: &Town, policy: &PolicySet, id: AgentId, clock: Clock) -> Activity {
    let a = &town.agents[id as usize];
    if !a.alive {
        return Activity::Absent;
    }
    if a.disease.state.is_hospitalized() {
        return Activity::Hospital;
    }
    let sick = a.disease.keeps_home();
    let isolated = a.is_isolated(clock.t);
    let slot = clock.week_slot();

    if a.employed && a.profession.works_shifts() {
        if a.works_shift_in(slot) {
            return if sick {
                Activity::HomeSick
            } else if isolated {
                Activity::HomeIsolated
            } else if a.caregiver {
                Activity::HomeCaregiving
            } else if a.profession == Profession::Service
                && (policy.leisure_closed
                    || a.workplace == NONE
                    || town.locations[a.workplace as usize].closed)
            {
                Activity::HomeBenefit
            } else {
                Activity::OnSite
            };
        }
        if clock.phase() == 1 && a.works_shift_in((slot + 20) % 21) {
            return home_variant(sick, isolated);
        }
    }

    if clock.is_work_phase() {
        match a.profession {
            Profession::Child => {
                return if sick {
                    Activity::HomeSick
                } else if isolated {
                    Activity::HomeIsolated
                } else if policy.schools_closed || a.class == NONE {
                    Activity::Home
                } else {
                    Activity::School
                };
            }
            Profession::BlueCollar if a.employed => {
                return if sick {
                    Activity::HomeSick
                } else if isolated {
                    Activity::HomeIsolated
                } else if a.caregiver {
                    Activity::HomeCaregiving
                } else {
                    Activity::OnSite
                };
            }
            Profession::WhiteCollar if a.employed => {
                return if sick {
                    Activity::HomeSick
                } else if a.caregiver {
                    Activity::TeleworkCaregiving
                } else if isolated || policy.mandatory_telework {
                    Activity::Telework
                } else {
                    Activity::OnSite
                };
            }
            Profession::Teacher if a.employed => {
                return if sick {
                    Activity::HomeSick
                } else if isolated {
                    Activity::HomeIsolated
                } else if policy.schools_closed {
                    Activity::Home
                } else {
                    Activity::OnSite
                };
            }
            _ => {}
        }
    }

    if clock.phase() == 3 || sick || isolated {
        return home_variant(sick, isolated);
    }
    Activity::Leisure
}

fn home_variant(sick: bool, isolated: bool) -> Activity {
    if sick {
        Activity::HomeSick
    } else if isolated {
        Activity::HomeIsolated
    } else {
        Activity::Home
    }
}

/// One entry of a leisure plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanTarget {
    Friend(AgentId),
    Facility(LocationId),
    Home,
}

/// Cumulative utility ladder over friends, non-commercial and commercial
/// facilities, in that order.
#[derive(Debug, Clone, Default)]
pub struct LeisureLadder {
    targets: Vec<PlanTarget>,
    utilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl LeisureLadder {
    pub fn build(
        friends: &[(AgentId, f64)],
        facilities: &[(LocationId, f64)],
        locations: &[Location],
        kappa: f64,
    ) -> Self {
        let mut nc = Vec::new();
        let mut c = Vec::new();
        for &(z, w) in facilities {
            let loc = &locations[z as usize];
            match loc.kind {
                LocationKind::NonCommercial => {
                    nc.push((PlanTarget::Facility(z), w * loc.attractiveness))
                }
                LocationKind::Commercial => {
                    c.push((PlanTarget::Facility(z), w * loc.attractiveness * kappa))
                }
                _ => {}
            }
        }
        let entries = friends
            .iter()
            .map(|&(f, w)| (PlanTarget::Friend(f), w))
            .chain(nc)
            .chain(c)
            .collect::<Vec<_>>();
        let mut ladder = LeisureLadder::default();
        for (t, u) in entries {
            ladder.targets.push(t);
            ladder.utilities.push(u.max(0.0));
        }
        ladder.recompute();
        ladder
    }

    fn recompute(&mut self) {
        self.cumulative.clear();
        let mut acc = 0.0;
        for &u in &self.utilities {
            acc += u;
            self.cumulative.push(acc);
        }
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (PlanTarget, f64)> + '_ {
        self.targets
            .iter()
            .copied()
            .zip(self.utilities.iter().copied())
    }

    /// Target whose rung contains `r` in `[0, total)`.
    pub fn lookup(&self, r: f64) -> PlanTarget {
        let i = self.cumulative.partition_point(|&c| c <= r);
        self.targets.get(i).copied().unwrap_or(PlanTarget::Home)
    }

    pub fn remove(&mut self, target: PlanTarget) {
        if let Some(i) = self.targets.iter().position(|&t| t == target) {
            self.targets.remove(i);
            self.utilities.remove(i);
            self.recompute();
        }
    }
}

/// Map a uniform draw over `[0, ladder total + home)` to a plan entry.
pub fn ladder_pick(ladder: &LeisureLadder, r: f64) -> PlanTarget {
    if r < ladder.total() {
        ladder.lookup(r)
    } else {
        PlanTarget::Home
    }
}

/// Draw a leisure plan into `out`: distinct entries, stopping at home, at
/// the maximum length or after the maximum number of draws.
pub fn build_leisure_plan(
    ladder: &LeisureLadder,
    home_mean: f64,
    home_multiplier: f64,
    le: &LeisureConfig,
    rng: &mut SimRng,
    out: &mut Vec<PlanTarget>,
) {
    out.clear();
    let z: f64 = rng.sample(StandardNormal);
    let home = (home_mean + le.preference_sd * home_mean * z).max(0.0) * home_multiplier;
    let f = ladder.total() + home;
    if f <= 0.0 || ladder.is_empty() {
        out.push(PlanTarget::Home);
        return;
    }
    let mut draws = 0;
    while out.len() < le.max_plan_length as usize && draws < le.max_plan_draws {
        draws += 1;
        let r = rng.random::<f64>() * f;
        let target = ladder_pick(ladder, r);
        if out.contains(&target) {
            continue;
        }
        out.push(target);
        if target == PlanTarget::Home {
            break;
        }
    }
}

/// Resolution state of an agent during leisure matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchState {
    #[default]
    Unresolved,
    /// Went somewhere on its own plan.
    Placed,
    /// Met a friend who stays put; others may join.
    Host,
    /// Joined a friend; cannot be met by others.
    Joined,
}

/// Leisure tallies of one phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LeisureTally {
    pub thwarts: u64,
    pub friend_meetings: u64,
    pub commercial_visits: u64,
}

impl Simulation {
    /// Build plans, match them and place every agent with `Activity::Leisure`.
    pub(crate) fn run_leisure(&mut self) -> LeisureTally {
        let mut tally = LeisureTally::default();
        let le = &self.cfg.leisure;
        let home_multiplier = self.policy.home_multiplier(&self.cfg.epidemic);
        let ps = &mut self.phase;
        ps.planners.clear();
        ps.plan_offsets.clear();
        ps.plans.clear();
        ps.plan_offsets.push(0);
        let mut buf = Vec::with_capacity(le.max_plan_length as usize);
        for id in 0..self.town.agents.len() as AgentId {
            if ps.activity[id as usize] != Activity::Leisure {
                continue;
            }
            let a = &self.town.agents[id as usize];
            ps.match_state[id as usize] = MatchState::Unresolved;
            if !a.plans_leisure() {
                continue;
            }
            build_leisure_plan(
                &self.town.ladders[id as usize],
                a.home_preference,
                home_multiplier,
                le,
                &mut self.rng,
                &mut buf,
            );
            ps.planners.push(id);
            ps.plans.extend_from_slice(&buf);
            ps.plan_offsets.push(ps.plans.len() as u32);
        }

        let rounds = le.max_plan_length as usize;
        let planners = std::mem::take(&mut self.phase.planners);
        for k in 0..rounds {
            for (i, &id) in planners.iter().enumerate() {
                if self.phase.match_state[id as usize] != MatchState::Unresolved {
                    continue;
                }
                let Some(entry) = self.phase.plan_entry(i, k) else {
                    continue;
                };
                match entry {
                    PlanTarget::Friend(_) => {}
                    PlanTarget::Home => {
                        self.phase.place[id as usize] = self.town.agents[id as usize].home;
                        self.phase.match_state[id as usize] = MatchState::Placed;
                    }
                    PlanTarget::Facility(z) => {
                        if self.try_enter(id, z, &mut tally) {
                            self.phase.place[id as usize] = z;
                            self.phase.match_state[id as usize] = MatchState::Placed;
                        } else {
                            tally.thwarts += 1;
                        }
                    }
                }
            }
            for (i, &id) in planners.iter().enumerate() {
                if self.phase.match_state[id as usize] != MatchState::Unresolved {
                    continue;
                }
                let Some(PlanTarget::Friend(f)) = self.phase.plan_entry(i, k) else {
                    continue;
                };
                if self.policy.contact_ban || !self.meet_friend(id, f, &mut tally) {
                    tally.thwarts += 1;
                } else {
                    tally.friend_meetings += 1;
                }
            }
        }
        for &id in &planners {
            if self.phase.match_state[id as usize] == MatchState::Unresolved {
                self.phase.place[id as usize] = self.town.agents[id as usize].home;
                self.phase.match_state[id as usize] = MatchState::Placed;
            }
        }
        self.phase.planners = planners;
        self.place_young_children();
        tally
    }

    fn meet_friend(&mut self, id: AgentId, f: AgentId, tally: &mut LeisureTally) -> bool {
        let fi = f as usize;
        if !self.town.agents[fi].alive || self.phase.activity[fi] != Activity::Leisure {
            return false;
        }
        match self.phase.match_state[fi] {
            MatchState::Joined => false,
            MatchState::Unresolved => {
                let home = self.town.agents[fi].home;
                self.phase.place[fi] = home;
                self.phase.match_state[fi] = MatchState::Host;
                self.phase.place[id as usize] = home;
                self.phase.match_state[id as usize] = MatchState::Joined;
                true
            }
            MatchState::Placed | MatchState::Host => {
                let loc = self.phase.place[fi];
                if self.town.locations[loc as usize].kind.is_leisure_facility()
                    && !self.try_enter(id, loc, tally)
                {
                    return false;
                }
                self.phase.match_state[fi] = MatchState::Host;
                self.phase.place[id as usize] = loc;
                self.phase.match_state[id as usize] = MatchState::Joined;
                true
            }
        }
    }

    /// Admission to a leisure facility, charging commercial entry.
    fn try_enter(&mut self, id: AgentId, z: LocationId, tally: &mut LeisureTally) -> bool {
        let loc = &self.town.locations[z as usize];
        if loc.closed || (self.policy.leisure_closed && loc.kind == LocationKind::Commercial) {
            return false;
        }
        if self.phase.guests[z as usize] >= loc.max_capacity {
            return false;
        }
        if loc.kind == LocationKind::Commercial {
            let firm = &self.town.firms[loc.index as usize];
            let available = self.town.agents[id as usize].leisure_savings;
            if available < firm.price {
                return false;
            }
            let spend =
                crate::economy::leisure_spend(firm.price, available, self.cfg.economy.splash);
            self.town.agents[id as usize].leisure_savings = (available - spend).max(0.0);
            let firm = &mut self.town.firms[loc.index as usize];
            firm.funds += spend;
            firm.week_sales += spend;
            firm.week_guests += 1;
            tally.commercial_visits += 1;
        }
        self.phase.guests[z as usize] += 1;
        true
    }

    /// Children under ten follow the first older household member who is out
    /// for leisure, space permitting.
    fn place_young_children(&mut self) {
        for h in 0..self.town.households.len() {
            let members = &self.town.households[h].members;
            if !members.iter().any(|&m| {
                let a = &self.town.agents[m as usize];
                a.is_young_child() && self.phase.activity[m as usize] == Activity::Leisure
            }) {
                continue;
            }
            let home = self.town.households[h].location;
            let chaperone = members.iter().copied().find(|&m| {
                self.town.agents[m as usize].plans_leisure()
                    && self.phase.activity[m as usize] == Activity::Leisure
            });
            let target = chaperone
                .map(|c| self.phase.place[c as usize])
                .unwrap_or(home);
            for i in 0..self.town.households[h].members.len() {
                let m = self.town.households[h].members[i];
                if !(self.town.agents[m as usize].is_young_child()
                    && self.phase.activity[m as usize] == Activity::Leisure)
                {
                    continue;
                }
                let kind = self.town.locations[target as usize].kind;
                let place = if kind.is_leisure_facility() {
                    if self.phase.guests[target as usize]
                        < self.town.locations[target as usize].max_capacity
                    {
                        self.phase.guests[target as usize] += 1;
                        target
                    } else {
                        home
                    }
                } else {
                    target
                };
                self.phase.place[m as usize] = place;
            }
        }
    }

    /// Daily caregiver choice while schools are closed.
    pub(crate) fn select_caregivers(&mut self) {
        for h in 0..self.town.households.len() {
            let current = self.town.households[h].caregiver;
            let chosen = select_caregiver(&self.town, h, current);
            if chosen != current {
                if current != NONE {
                    self.town.agents[current as usize].caregiver = false;
                }
                if chosen != NONE {
                    self.town.agents[chosen as usize].caregiver = true;
                }
                self.town.households[h].caregiver = chosen;
            }
        }
    }

    pub(crate) fn clear_caregivers(&mut self) {
        for h in self.town.households.iter_mut() {
            if h.caregiver != NONE {
                self.town.agents[h.caregiver as usize].caregiver = false;
                h.caregiver = NONE;
            }
        }
    }
}

/// Priority tier of a potential caregiver; lower is preferred.
pub fn caregiver_tier(town: &Town, id: AgentId) -> u8 {
    let a = &town.agents[id as usize];
    match a.profession {
        Profession::Pensioner | Profession::Owner | Profession::Teacher => 0,
        _ if !a.employed => 0,
        Profession::WhiteCollar => 1,
        _ => 2,
    }
}

/// Caregiver for household `h`, keeping `current` while it remains able.
pub fn select_caregiver(town: &Town, h: usize, current: AgentId) -> AgentId {
    let hh = &town.households[h];
    let needs_care = hh.members.iter().any(|&m| {
        let a = &town.agents[m as usize];
        a.alive && a.is_young_child()
    });
    if !needs_care {
        return NONE;
    }
    let able = |m: AgentId| {
        let a = &town.agents[m as usize];
        a.alive && a.is_adult() && !a.disease.state.is_hospitalized()
    };
    if current != NONE && hh.members.contains(&current) && able(current) {
        return current;
    }
    hh.members
        .iter()
        .copied()
        .filter(|&m| able(m))
        .min_by_key(|&m| (caregiver_tier(town, m), m))
        .unwrap_or(NONE)
}
