//! Containment policies and dated scenario schedules.

use serde::{Deserialize, Serialize};

use crate::config::EpidemicConfig;
use crate::error::ScenarioError;
use crate::types::FiscalMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    SanitaryHospitals,
    CaseIsolation,
    FamilyIsolation,
    WorkplaceIsolation,
    SchoolsClosed,
    CommercialLeisureClosed,
    SocialDistancing,
    ContactBan,
    MandatoryTelework,
}

impl Policy {
    pub const ALL: [Policy; 9] = [
        Policy::SanitaryHospitals,
        Policy::CaseIsolation,
        Policy::FamilyIsolation,
        Policy::WorkplaceIsolation,
        Policy::SchoolsClosed,
        Policy::CommercialLeisureClosed,
        Policy::SocialDistancing,
        Policy::ContactBan,
        Policy::MandatoryTelework,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::SanitaryHospitals => "sanitary_hospitals",
            Policy::CaseIsolation => "case_isolation",
            Policy::FamilyIsolation => "family_isolation",
            Policy::WorkplaceIsolation => "workplace_isolation",
            Policy::SchoolsClosed => "schools_closed",
            Policy::CommercialLeisureClosed => "commercial_leisure_closed",
            Policy::SocialDistancing => "social_distancing",
            Policy::ContactBan => "contact_ban",
            Policy::MandatoryTelework => "mandatory_telework",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ScenarioError> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| ScenarioError::UnknownPolicy(s.to_string()))
    }
}

/// Active policy flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolicySet {
    pub sanitary_hospitals: bool,
    pub case_isolation: bool,
    pub family_isolation: bool,
    pub workplace_isolation: bool,
    pub schools_closed: bool,
    pub leisure_closed: bool,
    pub social_distancing: bool,
    pub contact_ban: bool,
    pub mandatory_telework: bool,
}

impl PolicySet {
    fn flag(&mut self, p: Policy) -> &mut bool {
        match p {
            Policy::SanitaryHospitals => &mut self.sanitary_hospitals,
            Policy::CaseIsolation => &mut self.case_isolation,
            Policy::FamilyIsolation => &mut self.family_isolation,
            Policy::WorkplaceIsolation => &mut self.workplace_isolation,
            Policy::SchoolsClosed => &mut self.schools_closed,
            Policy::CommercialLeisureClosed => &mut self.leisure_closed,
            Policy::SocialDistancing => &mut self.social_distancing,
            Policy::ContactBan => &mut self.contact_ban,
            Policy::MandatoryTelework => &mut self.mandatory_telework,
        }
    }

    pub fn set(&mut self, p: Policy, on: bool) {
        *self.flag(p) = on;
    }

    pub fn is_active(&self, p: Policy) -> bool {
        let mut copy = *self;
        *copy.flag(p)
    }

    pub fn active(&self) -> Vec<Policy> {
        Policy::ALL
            .into_iter()
            .filter(|&p| self.is_active(p))
            .collect()
    }

    /// Maximum contacts per period, halved (rounding half up) under social
    /// distancing.
    pub fn contacts(&self, base: u32, ep: &EpidemicConfig) -> u32 {
        if self.social_distancing {
            (base as f64 * ep.distancing_contact_factor + 0.5).floor() as u32
        } else {
            base
        }
    }

    pub fn home_multiplier(&self, ep: &EpidemicConfig) -> f64 {
        if self.social_distancing {
            ep.distancing_home_multiplier
        } else {
            1.0
        }
    }

    pub fn hospital_hygiene(&self, ep: &EpidemicConfig) -> f64 {
        if self.sanitary_hospitals {
            ep.sanitary_hospital_hygiene
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEvent {
    pub day: u32,
    #[serde(default)]
    pub activate: Vec<Policy>,
    #[serde(default)]
    pub deactivate: Vec<Policy>,
}

/// Dated policy changes plus the fiscal regime and run length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSchedule {
    pub name: String,
    #[serde(default = "default_fiscal")]
    pub fiscal: FiscalMode,
    #[serde(default = "default_horizon")]
    pub horizon_days: u32,
    #[serde(default)]
    pub lift_all_day: Option<u32>,
    #[serde(default)]
    pub events: Vec<PolicyEvent>,
}

fn default_fiscal() -> FiscalMode {
    FiscalMode::Fixed
}

fn default_horizon() -> u32 {
    100
}

/// Names of the bundled scenarios.
pub const PRESETS: [&str; 5] = ["baseline", "rapid", "delayed", "baseline+lift100", "none"];

fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "baseline" => Some(include_str!("../scenarios/baseline.toml")),
        "rapid" => Some(include_str!("../scenarios/rapid.toml")),
        "delayed" => Some(include_str!("../scenarios/delayed.toml")),
        "baseline+lift100" => Some(include_str!("../scenarios/baseline_lift100.toml")),
        "none" => Some(include_str!("../scenarios/none.toml")),
        _ => None,
    }
}

impl ScenarioSchedule {
    /// A bundled scenario by name.
    pub fn preset(name: &str) -> Result<Self, ScenarioError> {
        let text = preset_text(name).ok_or_else(|| ScenarioError::Unknown {
            name: name.to_string(),
            available: PRESETS.join(", "),
        })?;
        Self::from_toml_str(text)
    }

    /// No policies ever.
    pub fn empty(horizon_days: u32) -> Self {
        ScenarioSchedule {
            name: "none".into(),
            fiscal: FiscalMode::Fixed,
            horizon_days,
            lift_all_day: None,
            events: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let s: ScenarioSchedule = toml::from_str(text).map_err(|e| {
            let msg = e.to_string();
            match msg.find("unknown variant `") {
                Some(i) => {
                    let rest = &msg[i + "unknown variant `".len()..];
                    ScenarioError::UnknownPolicy(
                        rest[..rest.find('`').unwrap_or(rest.len())].to_string(),
                    )
                }
                None => ScenarioError::Parse(msg),
            }
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// A preset name or a path to a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self, ScenarioError> {
        if preset_text(name_or_path).is_some() {
            return Self::preset(name_or_path);
        }
        let path = std::path::Path::new(name_or_path);
        if path.exists() {
            return Self::from_path(path);
        }
        Err(ScenarioError::Unknown {
            name: name_or_path.to_string(),
            available: PRESETS.join(", "),
        })
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for w in self.events.windows(2) {
            if w[1].day < w[0].day {
                return Err(ScenarioError::Unsorted {
                    earlier: w[0].day,
                    later: w[1].day,
                });
            }
        }
        Ok(())
    }

    pub fn with_fiscal(mut self, fiscal: FiscalMode) -> Self {
        self.fiscal = fiscal;
        self
    }

    pub fn with_horizon(mut self, days: u32) -> Self {
        self.horizon_days = days;
        self
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("schedule serializes")
    }

    /// Apply the changes dated `day`. Returns whether any flag changed.
    pub fn apply_day(&self, day: u32, set: &mut PolicySet) -> bool {
        let before = *set;
        for e in self.events.iter().filter(|e| e.day == day) {
            for &p in &e.activate {
                set.set(p, true);
            }
            for &p in &e.deactivate {
                set.set(p, false);
            }
        }
        if self.lift_all_day == Some(day) {
            *set = PolicySet::default();
        }
        *set != before
    }

    /// Flags in force on `day`.
    pub fn active_on(&self, day: u32) -> PolicySet {
        let mut set = PolicySet::default();
        for d in 0..=day {
            self.apply_day(d, &mut set);
        }
        set
    }
}
