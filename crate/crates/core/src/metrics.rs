//! Daily run records and per-run summaries.

use serde::{Deserialize, Serialize};

use crate::types::FiscalMode;

/// State at the end of a day. Row 0 is the state after the setup period.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub day: u32,
    pub new_infections: u64,
    pub new_detected: u64,
    pub cum_infections: u64,
    pub cum_detected: u64,
    pub cum_deaths: u64,
    pub active_infections: u64,
    pub hospital: u32,
    pub icu: u32,
    pub output: f64,
    pub cum_output_lost_pct: f64,
    pub unemployment_rate: f64,
    pub thwarts: u64,
    pub friend_meetings: u64,
    pub commercial_visits: u64,
    pub gov_savings: f64,
    pub gov_purchase: f64,
    pub goods_price: f64,
    pub leisure_savings: f64,
    pub mean_leisure_price: f64,
    /// New infections by place: household, retirement home, work, school,
    /// hospital, commercial and non-commercial leisure.
    pub inf_by_source: [u64; 7],
}

/// Everything recorded about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    pub scenario: String,
    pub fiscal: FiscalMode,
    pub horizon_days: u32,
    pub population: usize,
    pub setup_output: f64,
    pub initial_unemployment: f64,
    pub initial_leisure_savings: f64,
    /// First day whose record shows no exposed or infectious agent.
    pub elimination_day: Option<u32>,
    pub days: Vec<DayRecord>,
}

impl RunMetrics {
    fn at(&self, day: u32) -> &DayRecord {
        let i = (day as usize).min(self.days.len() - 1);
        &self.days[i]
    }

    pub fn deaths_at(&self, day: u32) -> u64 {
        self.at(day).cum_deaths
    }

    /// Deaths scaled to persons, in thousands.
    pub fn deaths_thousands_at(&self, day: u32, scale: f64) -> f64 {
        self.deaths_at(day) as f64 * scale / 1000.0
    }

    pub fn output_lost_at(&self, day: u32) -> f64 {
        self.at(day).cum_output_lost_pct
    }

    /// Someone is still exposed or infectious at the end of `period`
    /// (a multiple of three).
    pub fn extant_at_period(&self, period: u32) -> bool {
        self.at(period / 3).active_infections > 0
    }

    pub fn eliminated_by(&self, day: u32) -> bool {
        self.elimination_day.is_some_and(|d| d <= day)
    }

    pub fn total_infections(&self) -> u64 {
        self.days.last().map_or(0, |d| d.cum_infections)
    }

    pub fn total_detected(&self) -> u64 {
        self.days.last().map_or(0, |d| d.cum_detected)
    }
}
