//! Parameter tables and their validation.
//!
//! A [`TownConfig`] is read from TOML. Every key is required; unknown keys
//! are rejected so that typos do not silently fall back to defaults.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::types::Profession;

/// The default parameter file shipped with the crate.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../config/default.toml");

/// Number of five-year age groups.
pub const AGE_GROUPS: usize = 17;

/// Parameters accepted by [`TownConfig::set_parameter`].
pub const SWEEPABLE: [&str; 7] = [
    "beta",
    "epsilon",
    "omega",
    "kappa",
    "mu_l",
    "sigma",
    "population",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TownConfig {
    pub schema_version: u32,
    pub population: PopulationConfig,
    pub timeline: TimelineConfig,
    pub epidemic: EpidemicConfig,
    pub economy: EconomyConfig,
    pub locations: LocationConfig,
    pub households: HouseholdConfig,
    pub leisure: LeisureConfig,
    pub age_groups: Vec<AgeGroupRow>,
    pub professions: ProfessionTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub size: usize,
    /// Persons represented by one agent.
    pub scale: f64,
    pub initial_infected_share: f64,
}

/// Disease durations in periods. Latent and incubation periods count from
/// infection, everything else from symptom onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineConfig {
    pub latent: u32,
    pub incubation: u32,
    pub mild_recovery: u32,
    pub until_admission: u32,
    pub severe_recovery: u32,
    pub severe_death: u32,
    pub critical_icu_stay: u32,
    pub critical_recovery: u32,
    pub critical_death: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicConfig {
    pub beta: f64,
    pub contacts: u32,
    pub detection_threshold: f64,
    pub unable_to_work_threshold: f64,
    pub icu_death_share: f64,
    pub severe_no_bed_death_share: f64,
    pub commercial_standard_capacity: f64,
    pub noncommercial_standard_capacity: f64,
    pub max_capacity_factor: f64,
    pub sanitary_hospital_hygiene: f64,
    pub distancing_contact_factor: f64,
    pub distancing_home_multiplier: f64,
    pub contact_isolation_periods: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyConfig {
    pub expected_profit_rate: f64,
    pub profit_buffer: f64,
    pub owner_tax: f64,
    pub unemployment_benefit: f64,
    pub sick_pay: f64,
    pub quarantine_pay: f64,
    pub caregiving_pay: f64,
    pub telework_efficiency: f64,
    pub caregiving_telework_efficiency: f64,
    pub price_step_large: f64,
    pub price_step_small: f64,
    pub splash: f64,
    pub consumption_share: f64,
    pub blue_collar_productivity: f64,
    pub white_collar_productivity: f64,
    pub utilization_max: f64,
    pub utilization_low: f64,
    pub utilization_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationConfig {
    pub blue_collar_per_factory: u32,
    pub white_collar_per_office: u32,
    pub service_per_facility: u32,
    pub teachers_per_school: u32,
    pub hospitals_per_capita: f64,
    pub retirement_homes_per_capita: f64,
    pub class_size: u32,
    pub noncommercial_per_commercial: f64,
    pub beds_per_capita: f64,
    pub icus_per_capita: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdConfig {
    pub per_capita: f64,
    pub single: f64,
    pub single_with_children: f64,
    pub couple: f64,
    pub couple_with_children: f64,
    pub intergenerational: f64,
    pub intergenerational_with_children: f64,
    pub single_pensioner: f64,
    pub pensioner_couple: f64,
    pub pensioners_intergenerational: f64,
    pub pensioners_retirement_home: f64,
    pub pensioners_alone: f64,
}

impl HouseholdConfig {
    pub fn type_shares(&self) -> [f64; 8] {
        [
            self.single,
            self.single_with_children,
            self.couple,
            self.couple_with_children,
            self.intergenerational,
            self.intergenerational_with_children,
            self.single_pensioner,
            self.pensioner_couple,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeisureConfig {
    pub max_plan_length: u32,
    pub max_plan_draws: u32,
    pub friends_min: u32,
    pub friends_max: u32,
    pub facility_edges_min: u32,
    pub facility_edges_max: u32,
    /// Relative standard deviation of edge weights and home preference.
    pub preference_sd: f64,
    /// Mean facility attractiveness.
    pub attractiveness_mean: f64,
    /// Relative standard deviation of facility attractiveness.
    pub attractiveness_sd: f64,
    pub table_attractiveness: f64,
    pub kappa: f64,
    pub table_kappa: f64,
    pub brackets: Vec<LeisureBracket>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeisureBracket {
    pub first_age_group: u8,
    pub friend: f64,
    pub noncommercial: f64,
    pub commercial: f64,
    pub home: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeGroupRow {
    pub hospitalized: f64,
    pub critical: f64,
    pub severe_death: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfessionRow {
    pub share: f64,
    pub unemployment: f64,
    pub gross_wage: f64,
    pub net_wage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfessionTable {
    pub child: ProfessionRow,
    pub blue_collar: ProfessionRow,
    pub white_collar: ProfessionRow,
    pub service: ProfessionRow,
    pub teacher: ProfessionRow,
    pub health: ProfessionRow,
    pub pensioner: ProfessionRow,
    pub owner: ProfessionRow,
}

impl ProfessionTable {
    pub fn row(&self, p: Profession) -> &ProfessionRow {
        match p {
            Profession::Child => &self.child,
            Profession::BlueCollar => &self.blue_collar,
            Profession::WhiteCollar => &self.white_collar,
            Profession::Service => &self.service,
            Profession::Teacher => &self.teacher,
            Profession::Health => &self.health,
            Profession::Pensioner => &self.pensioner,
            Profession::Owner => &self.owner,
        }
    }
}

impl Default for TownConfig {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG_TOML).expect("bundled default config is valid")
    }
}

fn missing_key(message: &str) -> Option<String> {
    let start = message.find("missing field `")? + "missing field `".len();
    let end = message[start..].find('`')?;
    Some(message[start..start + end].to_string())
}

impl TownConfig {
    /// Parse and validate a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: TownConfig = toml::from_str(text).map_err(|e| {
            let msg = e.to_string();
            match missing_key(&msg) {
                Some(key) => ConfigError::MissingKey(key),
                None => ConfigError::Parse(msg),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A copy with a different population size.
    pub fn with_population(mut self, size: usize) -> Self {
        self.population.size = size;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |key: &str, v: f64| -> Result<(), ConfigError> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: key.to_string(),
                    value: v,
                    expected: "[0, 1]",
                })
            }
        };
        let positive = |key: &str, v: f64| -> Result<(), ConfigError> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: key.to_string(),
                    value: v,
                    expected: "> 0",
                })
            }
        };
        let at_least_one = |key: &str, v: f64| -> Result<(), ConfigError> {
            if v >= 1.0 {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: key.to_string(),
                    value: v,
                    expected: ">= 1",
                })
            }
        };

        positive("population.scale", self.population.scale)?;
        unit(
            "population.initial_infected_share",
            self.population.initial_infected_share,
        )?;

        let tl = &self.timeline;
        if tl.latent > tl.incubation {
            return Err(ConfigError::Inconsistent(
                "timeline.latent exceeds timeline.incubation".into(),
            ));
        }
        if tl.critical_icu_stay > tl.critical_recovery {
            return Err(ConfigError::Inconsistent(
                "timeline.critical_icu_stay exceeds timeline.critical_recovery".into(),
            ));
        }
        positive("timeline.mild_recovery", tl.mild_recovery as f64)?;
        for (key, v) in [
            ("timeline.severe_recovery", tl.severe_recovery),
            ("timeline.severe_death", tl.severe_death),
            ("timeline.critical_icu_stay", tl.critical_icu_stay),
            ("timeline.critical_death", tl.critical_death),
        ] {
            if v <= tl.until_admission {
                return Err(ConfigError::Inconsistent(format!(
                    "{key} must come after timeline.until_admission"
                )));
            }
        }

        let ep = &self.epidemic;
        positive("epidemic.beta", ep.beta)?;
        unit("epidemic.beta", ep.beta)?;
        at_least_one("epidemic.contacts", ep.contacts as f64)?;
        unit("epidemic.detection_threshold", ep.detection_threshold)?;
        unit(
            "epidemic.unable_to_work_threshold",
            ep.unable_to_work_threshold,
        )?;
        unit("epidemic.icu_death_share", ep.icu_death_share)?;
        unit(
            "epidemic.severe_no_bed_death_share",
            ep.severe_no_bed_death_share,
        )?;
        at_least_one(
            "epidemic.commercial_standard_capacity",
            ep.commercial_standard_capacity,
        )?;
        at_least_one(
            "epidemic.noncommercial_standard_capacity",
            ep.noncommercial_standard_capacity,
        )?;
        at_least_one("epidemic.max_capacity_factor", ep.max_capacity_factor)?;
        unit(
            "epidemic.sanitary_hospital_hygiene",
            ep.sanitary_hospital_hygiene,
        )?;
        unit(
            "epidemic.distancing_contact_factor",
            ep.distancing_contact_factor,
        )?;
        positive(
            "epidemic.distancing_home_multiplier",
            ep.distancing_home_multiplier,
        )?;

        let ec = &self.economy;
        positive("economy.expected_profit_rate", ec.expected_profit_rate)?;
        unit("economy.profit_buffer", ec.profit_buffer)?;
        unit("economy.owner_tax", ec.owner_tax)?;
        unit("economy.unemployment_benefit", ec.unemployment_benefit)?;
        unit("economy.sick_pay", ec.sick_pay)?;
        unit("economy.quarantine_pay", ec.quarantine_pay)?;
        unit("economy.caregiving_pay", ec.caregiving_pay)?;
        unit("economy.telework_efficiency", ec.telework_efficiency)?;
        unit(
            "economy.caregiving_telework_efficiency",
            ec.caregiving_telework_efficiency,
        )?;
        unit("economy.price_step_large", ec.price_step_large)?;
        unit("economy.price_step_small", ec.price_step_small)?;
        unit("economy.splash", ec.splash)?;
        unit("economy.consumption_share", ec.consumption_share)?;
        positive(
            "economy.blue_collar_productivity",
            ec.blue_collar_productivity,
        )?;
        positive(
            "economy.white_collar_productivity",
            ec.white_collar_productivity,
        )?;
        positive("economy.utilization_max", ec.utilization_max)?;
        positive("economy.utilization_low", ec.utilization_low)?;
        if ec.utilization_high < ec.utilization_low {
            return Err(ConfigError::Inconsistent(
                "economy.utilization_high is below economy.utilization_low".into(),
            ));
        }

        let lc = &self.locations;
        for (key, v) in [
            (
                "locations.blue_collar_per_factory",
                lc.blue_collar_per_factory,
            ),
            (
                "locations.white_collar_per_office",
                lc.white_collar_per_office,
            ),
            ("locations.service_per_facility", lc.service_per_facility),
            ("locations.teachers_per_school", lc.teachers_per_school),
            ("locations.class_size", lc.class_size),
        ] {
            at_least_one(key, v as f64)?;
        }
        unit("locations.hospitals_per_capita", lc.hospitals_per_capita)?;
        unit(
            "locations.retirement_homes_per_capita",
            lc.retirement_homes_per_capita,
        )?;
        unit("locations.beds_per_capita", lc.beds_per_capita)?;
        unit("locations.icus_per_capita", lc.icus_per_capita)?;
        if lc.noncommercial_per_commercial.is_nan() || lc.noncommercial_per_commercial < 0.0 {
            return Err(ConfigError::OutOfRange {
                key: "locations.noncommercial_per_commercial".into(),
                value: lc.noncommercial_per_commercial,
                expected: ">= 0",
            });
        }

        let hh = &self.households;
        positive("households.per_capita", hh.per_capita)?;
        unit("households.per_capita", hh.per_capita)?;
        for (i, s) in hh.type_shares().iter().enumerate() {
            unit(&format!("households type share #{i}"), *s)?;
        }
        check_sum("household type shares", hh.type_shares().iter().sum(), 1e-9)?;
        let residence = [
            hh.pensioners_intergenerational,
            hh.pensioners_retirement_home,
            hh.pensioners_alone,
        ];
        for s in residence {
            unit("households.pensioners_*", s)?;
        }
        check_sum("pensioner residence shares", residence.iter().sum(), 1e-9)?;

        let le = &self.leisure;
        at_least_one("leisure.max_plan_length", le.max_plan_length as f64)?;
        if le.max_plan_draws < le.max_plan_length {
            return Err(ConfigError::Inconsistent(
                "leisure.max_plan_draws below max_plan_length".into(),
            ));
        }
        if le.friends_min > le.friends_max || le.facility_edges_min > le.facility_edges_max {
            return Err(ConfigError::Inconsistent(
                "leisure edge count bounds are reversed".into(),
            ));
        }
        unit("leisure.preference_sd", le.preference_sd)?;
        unit("leisure.attractiveness_sd", le.attractiveness_sd)?;
        positive("leisure.attractiveness_mean", le.attractiveness_mean)?;
        positive("leisure.table_attractiveness", le.table_attractiveness)?;
        positive("leisure.kappa", le.kappa)?;
        positive("leisure.table_kappa", le.table_kappa)?;
        if le.brackets.is_empty() {
            return Err(ConfigError::MissingKey("leisure.brackets".into()));
        }
        let mut prev = None;
        for b in &le.brackets {
            if let Some(p) = prev {
                if b.first_age_group <= p {
                    return Err(ConfigError::Inconsistent(
                        "leisure.brackets must be sorted by age".into(),
                    ));
                }
            }
            prev = Some(b.first_age_group);
            for (key, v) in [
                ("friend", b.friend),
                ("noncommercial", b.noncommercial),
                ("commercial", b.commercial),
                ("home", b.home),
            ] {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(ConfigError::OutOfRange {
                        key: format!("leisure.brackets.{key}"),
                        value: v,
                        expected: ">= 0",
                    });
                }
            }
        }

        if self.age_groups.len() != AGE_GROUPS {
            return Err(ConfigError::Inconsistent(format!(
                "expected {AGE_GROUPS} age groups, found {}",
                self.age_groups.len()
            )));
        }
        for (i, row) in self.age_groups.iter().enumerate() {
            unit(&format!("age_groups[{i}].hospitalized"), row.hospitalized)?;
            unit(&format!("age_groups[{i}].critical"), row.critical)?;
            unit(&format!("age_groups[{i}].severe_death"), row.severe_death)?;
            unit(&format!("age_groups[{i}].share"), row.share)?;
        }
        // The published age shares are rounded and add up to about 0.991; they
        // are used as relative weights, so only a loose check applies here.
        check_sum(
            "age group shares",
            self.age_groups.iter().map(|r| r.share).sum(),
            0.02,
        )?;

        let mut share_sum = 0.0;
        for p in Profession::ALL {
            let row = self.professions.row(p);
            unit(&format!("professions.{}.share", p.key()), row.share)?;
            unit(
                &format!("professions.{}.unemployment", p.key()),
                row.unemployment,
            )?;
            if row.gross_wage < 0.0 || row.net_wage < 0.0 || row.net_wage > row.gross_wage + 1e-12 {
                return Err(ConfigError::Inconsistent(format!(
                    "professions.{}: wages must satisfy 0 <= net <= gross",
                    p.key()
                )));
            }
            share_sum += row.share;
        }
        check_sum("profession shares", share_sum, 1e-9)?;
        Ok(())
    }

    /// Change one of the [`SWEEPABLE`] parameters.
    pub fn set_parameter(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        match name {
            "beta" => self.epidemic.beta = value,
            "epsilon" => self.economy.profit_buffer = value,
            "omega" => self.economy.splash = value,
            "kappa" => self.leisure.kappa = value,
            "mu_l" => self.leisure.attractiveness_mean = value,
            "sigma" => self.leisure.preference_sd = value,
            "population" => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(ConfigError::OutOfRange {
                        key: "population".into(),
                        value,
                        expected: "a non-negative integer",
                    });
                }
                self.population.size = value as usize;
            }
            other => return Err(ConfigError::NotSweepable(other.to_string())),
        }
        self.validate()
    }

    /// Bracket of leisure preferences for an age group, if the group plans leisure.
    pub fn leisure_bracket(&self, age_group: u8) -> Option<&LeisureBracket> {
        self.leisure
            .brackets
            .iter()
            .rev()
            .find(|b| age_group >= b.first_age_group)
    }
}

fn check_sum(what: &str, sum: f64, tol: f64) -> Result<(), ConfigError> {
    if (sum - 1.0).abs() <= tol {
        Ok(())
    } else {
        Err(ConfigError::SharesDoNotSum {
            what: what.to_string(),
            sum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_file_carries_reference_values() {
        let cfg = TownConfig::default();
        assert_eq!(cfg.epidemic.beta, 0.095);
        assert_eq!(cfg.epidemic.contacts, 10);
        assert_eq!(cfg.economy.expected_profit_rate, 0.4);
        assert_eq!(cfg.economy.profit_buffer, 0.1);
        assert_eq!(cfg.population.size, 82_000);
        assert_eq!(cfg.age_groups[16].critical, 0.709);
        assert_eq!(cfg.professions.white_collar.net_wage, 1.05);
        assert_eq!(cfg.leisure_bracket(14).unwrap().home, 810.0);
        assert!(cfg.leisure_bracket(1).is_none());
    }

    #[test]
    fn negative_beta_is_rejected() {
        let text = DEFAULT_CONFIG_TOML.replace("beta = 0.095", "beta = -1.0");
        match TownConfig::from_toml_str(&text) {
            Err(ConfigError::OutOfRange { key, .. }) => assert_eq!(key, "epidemic.beta"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_key_is_named() {
        let text = DEFAULT_CONFIG_TOML.replace("splash = 0.4\n", "");
        match TownConfig::from_toml_str(&text) {
            Err(ConfigError::MissingKey(key)) => assert_eq!(key, "splash"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn household_shares_must_sum_to_one() {
        let text = DEFAULT_CONFIG_TOML.replace("single = 0.138", "single = 0.2");
        assert!(matches!(
            TownConfig::from_toml_str(&text),
            Err(ConfigError::SharesDoNotSum { .. })
        ));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = DEFAULT_CONFIG_TOML.replace("[economy]\n", "[economy]\nbogus = 1.0\n");
        assert!(matches!(
            TownConfig::from_toml_str(&text),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = TownConfig::default();
        let again = TownConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn sweep_whitelist() {
        let mut cfg = TownConfig::default();
        cfg.set_parameter("beta", 0.1).unwrap();
        assert_eq!(cfg.epidemic.beta, 0.1);
        cfg.set_parameter("population", 1000.0).unwrap();
        assert_eq!(cfg.population.size, 1000);
        assert!(matches!(
            cfg.set_parameter("gamma", 3.0),
            Err(ConfigError::NotSweepable(_))
        ));
    }
}
