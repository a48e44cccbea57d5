//! Identifiers and small enums shared by every module.

use serde::{Deserialize, Serialize};

pub type AgentId = u32;
pub type LocationId = u32;
pub type FirmId = u32;

/// Sentinel for "no id".
pub const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Profession {
    Child,
    BlueCollar,
    WhiteCollar,
    Service,
    Teacher,
    Health,
    Pensioner,
    Owner,
}

impl Profession {
    pub const ALL: [Profession; 8] = [
        Profession::Child,
        Profession::BlueCollar,
        Profession::WhiteCollar,
        Profession::Service,
        Profession::Teacher,
        Profession::Health,
        Profession::Pensioner,
        Profession::Owner,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Profession::Child => "child",
            Profession::BlueCollar => "blue_collar",
            Profession::WhiteCollar => "white_collar",
            Profession::Service => "service",
            Profession::Teacher => "teacher",
            Profession::Health => "health",
            Profession::Pensioner => "pensioner",
            Profession::Owner => "owner",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Inclusive range of age groups the profession can have.
    pub fn age_span(self) -> (u8, u8) {
        match self {
            Profession::Child => (0, 3),
            Profession::Pensioner => (13, 16),
            Profession::Owner => (4, 16),
            _ => (4, 12),
        }
    }

    /// Workers employed by private firms.
    pub fn is_private(self) -> bool {
        matches!(
            self,
            Profession::BlueCollar | Profession::WhiteCollar | Profession::Service
        )
    }

    /// Professions whose members can be employed or unemployed.
    pub fn is_worker(self) -> bool {
        matches!(
            self,
            Profession::BlueCollar
                | Profession::WhiteCollar
                | Profession::Service
                | Profession::Teacher
                | Profession::Health
        )
    }

    pub fn works_shifts(self) -> bool {
        matches!(self, Profession::Service | Profession::Health)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationKind {
    Household,
    RetirementHome,
    Factory,
    Office,
    School,
    Hospital,
    Commercial,
    NonCommercial,
}

impl LocationKind {
    pub fn is_leisure_facility(self) -> bool {
        matches!(self, LocationKind::Commercial | LocationKind::NonCommercial)
    }

    pub fn is_residence(self) -> bool {
        matches!(self, LocationKind::Household | LocationKind::RetirementHome)
    }
}

/// Where an infection happened, as reported in the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfectionSource {
    Household,
    RetirementHome,
    Work,
    School,
    Hospital,
    Commercial,
    NonCommercial,
    Seed,
}

impl InfectionSource {
    pub const REPORTED: [InfectionSource; 7] = [
        InfectionSource::Household,
        InfectionSource::RetirementHome,
        InfectionSource::Work,
        InfectionSource::School,
        InfectionSource::Hospital,
        InfectionSource::Commercial,
        InfectionSource::NonCommercial,
    ];

    pub fn of(kind: LocationKind) -> Self {
        match kind {
            LocationKind::Household => InfectionSource::Household,
            LocationKind::RetirementHome => InfectionSource::RetirementHome,
            LocationKind::Factory | LocationKind::Office => InfectionSource::Work,
            LocationKind::School => InfectionSource::School,
            LocationKind::Hospital => InfectionSource::Hospital,
            LocationKind::Commercial => InfectionSource::Commercial,
            LocationKind::NonCommercial => InfectionSource::NonCommercial,
        }
    }

    pub fn column(self) -> &'static str {
        match self {
            InfectionSource::Household => "inf_household",
            InfectionSource::RetirementHome => "inf_retirement_home",
            InfectionSource::Work => "inf_work",
            InfectionSource::School => "inf_school",
            InfectionSource::Hospital => "inf_hospital",
            InfectionSource::Commercial => "inf_commercial",
            InfectionSource::NonCommercial => "inf_noncommercial",
            InfectionSource::Seed => "inf_seed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiscalMode {
    /// Government purchases equal current savings, floored at zero.
    ZeroDeficit,
    /// Government purchases stay at their setup level.
    Fixed,
}

impl FiscalMode {
    pub fn name(self) -> &'static str {
        match self {
            FiscalMode::ZeroDeficit => "zero-deficit",
            FiscalMode::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero-deficit" => Some(FiscalMode::ZeroDeficit),
            "fixed" => Some(FiscalMode::Fixed),
            _ => None,
        }
    }
}
