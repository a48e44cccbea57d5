//! State of a synthesized town: agents, places, firms and the government.

use crate::epidemic::DiseaseRecord;
use crate::social::LeisureLadder;
use crate::types::{AgentId, FirmId, LocationId, LocationKind, Profession, NONE};

/// Income received in each of the last 21 periods.
pub type IncomeWindow = [f64; 21];

#[derive(Debug, Clone)]
pub struct Agent {
    pub id: AgentId,
    pub age_group: u8,
    pub profession: Profession,
    pub employed: bool,
    pub alive: bool,
    /// Residence: a household or a retirement home.
    pub home: LocationId,
    /// Index into `Town::households`, `NONE` for retirement-home residents.
    pub household: u32,
    pub employer: FirmId,
    pub workplace: LocationId,
    /// Index into `Town::classes` for children.
    pub class: u32,
    /// Bit `s` set when the agent works in week slot `s` (shift workers only).
    pub shifts: u32,
    pub funds: f64,
    pub leisure_savings: f64,
    /// Share of the consumption reserve put aside for leisure.
    pub leisure_share: f64,
    pub home_preference: f64,
    pub disease: DiseaseRecord,
    /// The agent is isolated while `t < isolated_until`.
    pub isolated_until: u32,
    pub caregiver: bool,
}

impl Agent {
    pub fn new(id: AgentId, age_group: u8, profession: Profession) -> Self {
        Agent {
            id,
            age_group,
            profession,
            employed: false,
            alive: true,
            home: NONE,
            household: NONE,
            employer: NONE,
            workplace: NONE,
            class: NONE,
            shifts: 0,
            funds: 0.0,
            leisure_savings: 0.0,
            leisure_share: 0.0,
            home_preference: 0.0,
            disease: DiseaseRecord::default(),
            isolated_until: 0,
            caregiver: false,
        }
    }

    /// At least ten years old: plans leisure and has friends.
    pub fn plans_leisure(&self) -> bool {
        self.age_group >= 2
    }

    /// At least twenty years old: can inherit and give care.
    pub fn is_adult(&self) -> bool {
        self.age_group >= 4
    }

    /// Younger than ten: needs a chaperone for leisure and care when schools close.
    pub fn is_young_child(&self) -> bool {
        self.age_group <= 1
    }

    pub fn is_isolated(&self, t: u32) -> bool {
        t < self.isolated_until
    }

    pub fn works_shift_in(&self, week_slot: u32) -> bool {
        self.employed && self.shifts & (1 << week_slot) != 0
    }
}

#[derive(Debug, Clone)]
pub struct Location {
    pub kind: LocationKind,
    /// Firm id for firms, otherwise the index into the kind's own table.
    pub index: u32,
    /// Standard capacity of leisure facilities (0 elsewhere).
    pub standard_capacity: f64,
    /// Maximum guests of leisure facilities (0 elsewhere).
    pub max_capacity: u32,
    pub attractiveness: f64,
    /// Permanently closed after its firm dissolved.
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirmKind {
    Factory,
    Office,
    Commercial,
}

#[derive(Debug, Clone)]
pub struct Firm {
    pub id: FirmId,
    pub kind: FirmKind,
    pub location: LocationId,
    pub owner: AgentId,
    pub funds: f64,
    pub employees: Vec<AgentId>,
    pub dissolved: bool,
    /// Entry price of a commercial leisure facility.
    pub price: f64,
    pub week_sales: f64,
    pub week_costs: f64,
    pub week_guests: u32,
    pub day_output: f64,
    pub last_profit_rate: Option<f64>,
}

impl Firm {
    pub fn profession(&self) -> Profession {
        match self.kind {
            FirmKind::Factory => Profession::BlueCollar,
            FirmKind::Office => Profession::WhiteCollar,
            FirmKind::Commercial => Profession::Service,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HouseholdKind {
    Single,
    SingleWithChildren,
    Couple,
    CoupleWithChildren,
    Intergenerational,
    IntergenerationalWithChildren,
    SinglePensioner,
    PensionerCouple,
}

impl HouseholdKind {
    pub const ALL: [HouseholdKind; 8] = [
        HouseholdKind::Single,
        HouseholdKind::SingleWithChildren,
        HouseholdKind::Couple,
        HouseholdKind::CoupleWithChildren,
        HouseholdKind::Intergenerational,
        HouseholdKind::IntergenerationalWithChildren,
        HouseholdKind::SinglePensioner,
        HouseholdKind::PensionerCouple,
    ];
}

#[derive(Debug, Clone)]
pub struct Household {
    pub location: LocationId,
    pub kind: HouseholdKind,
    pub members: Vec<AgentId>,
    pub caregiver: AgentId,
}

#[derive(Debug, Clone)]
pub struct RetirementHome {
    pub location: LocationId,
    pub residents: Vec<AgentId>,
}

#[derive(Debug, Clone)]
pub struct SchoolClass {
    pub school: u32,
    pub members: Vec<AgentId>,
}

#[derive(Debug, Clone)]
pub struct School {
    pub location: LocationId,
    pub classes: Vec<u32>,
    pub teachers: Vec<AgentId>,
}

#[derive(Debug, Clone)]
pub struct Hospital {
    pub location: LocationId,
    pub beds: u32,
    pub icus: u32,
    pub beds_used: u32,
    pub icus_used: u32,
    pub staff: Vec<AgentId>,
}

#[derive(Debug, Clone, Default)]
pub struct Government {
    /// Savings, tracking every public flow.
    pub savings: f64,
    /// Purchases per consumption day in the fixed regime.
    pub g0: f64,
    pub last_purchase: f64,
}

/// A set of agent ids with O(1) insert, remove and uniform choice.
#[derive(Debug, Clone, Default)]
pub struct IdPool {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IdPool {
    pub fn with_universe(n: usize) -> Self {
        IdPool {
            items: Vec::new(),
            pos: vec![NONE; n],
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.pos.get(id as usize).is_some_and(|&p| p != NONE)
    }

    pub fn insert(&mut self, id: u32) {
        if self.contains(id) {
            return;
        }
        if id as usize >= self.pos.len() {
            self.pos.resize(id as usize + 1, NONE);
        }
        self.pos[id as usize] = self.items.len() as u32;
        self.items.push(id);
    }

    pub fn remove(&mut self, id: u32) -> bool {
        if !self.contains(id) {
            return false;
        }
        let p = self.pos[id as usize] as usize;
        let last = *self.items.last().expect("non-empty");
        self.items.swap_remove(p);
        if last != id {
            self.pos[last as usize] = p as u32;
        }
        self.pos[id as usize] = NONE;
        true
    }

    pub fn get(&self, i: usize) -> u32 {
        self.items[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.items
    }
}

/// Index of the unemployment pool for a private-sector profession.
pub fn pool_index(p: Profession) -> Option<usize> {
    match p {
        Profession::BlueCollar => Some(0),
        Profession::WhiteCollar => Some(1),
        Profession::Service => Some(2),
        _ => None,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Town {
    pub agents: Vec<Agent>,
    pub income: Vec<IncomeWindow>,
    pub locations: Vec<Location>,
    pub firms: Vec<Firm>,
    pub households: Vec<Household>,
    pub retirement_homes: Vec<RetirementHome>,
    pub schools: Vec<School>,
    pub classes: Vec<SchoolClass>,
    pub hospitals: Vec<Hospital>,
    /// Symmetric weighted friendships.
    pub friends: Vec<Vec<(AgentId, f64)>>,
    /// Edges to leisure facilities with their base weights.
    pub facility_edges: Vec<Vec<(LocationId, f64)>>,
    pub ladders: Vec<LeisureLadder>,
    /// Unemployed blue-collar, white-collar and service workers.
    pub unemployed: [IdPool; 3],
    pub government: Government,
    /// Consumption goods produced during the setup period.
    pub setup_output: f64,
    pub default_leisure_price: f64,
}

impl Town {
    pub fn population(&self) -> usize {
        self.agents.len()
    }

    pub fn living(&self) -> impl Iterator<Item = &Agent> {
        self.agents.iter().filter(|a| a.alive)
    }

    /// Total money: agents' funds and leisure savings, firms' funds and
    /// government savings.
    pub fn total_money(&self) -> f64 {
        let agents: f64 = self
            .agents
            .iter()
            .map(|a| a.funds + a.leisure_savings)
            .sum();
        let firms: f64 = self.firms.iter().map(|f| f.funds).sum();
        agents + firms + self.government.savings
    }

    pub fn weekly_income(&self, id: AgentId) -> f64 {
        self.income[id as usize].iter().sum()
    }

    pub fn count_locations(&self, kind: LocationKind) -> usize {
        self.locations.iter().filter(|l| l.kind == kind).count()
    }

    /// Private-sector unemployment rate among living workers.
    pub fn private_unemployment_rate(&self) -> f64 {
        let mut labour = 0usize;
        let mut unemployed = 0usize;
        for a in self
            .agents
            .iter()
            .filter(|a| a.alive && a.profession.is_private())
        {
            labour += 1;
            if !a.employed {
                unemployed += 1;
            }
        }
        if labour == 0 {
            0.0
        } else {
            unemployed as f64 / labour as f64
        }
    }

    pub fn total_leisure_savings(&self) -> f64 {
        self.agents.iter().map(|a| a.leisure_savings).sum()
    }

    /// Members of an agent's residence (household or retirement home).
    pub fn residents_of(&self, agent: &Agent) -> &[AgentId] {
        if agent.household != NONE {
            &self.households[agent.household as usize].members
        } else {
            let loc = &self.locations[agent.home as usize];
            &self.retirement_homes[loc.index as usize].residents
        }
    }
}
