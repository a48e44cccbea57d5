//! Simulation calendar: three phases per day, weeks start on Monday.

pub const PHASES_PER_DAY: u32 = 3;
pub const PERIODS_PER_WEEK: u32 = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    pub fn from_index(i: u32) -> Self {
        match i % 7 {
            0 => Weekday::Mon,
            1 => Weekday::Tue,
            2 => Weekday::Wed,
            3 => Weekday::Thu,
            4 => Weekday::Fri,
            5 => Weekday::Sat,
            _ => Weekday::Sun,
        }
    }
}

/// Position of a period in the calendar. Period 0 is the setup period;
/// period 1 is the first phase of day 0, a Monday.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clock {
    pub t: u32,
}

impl Clock {
    pub fn new(t: u32) -> Self {
        Clock { t }
    }

    pub fn is_setup(self) -> bool {
        self.t == 0
    }

    /// Phase 1, 2 or 3 (0 during setup).
    pub fn phase(self) -> u32 {
        if self.t == 0 {
            0
        } else {
            (self.t - 1) % PHASES_PER_DAY + 1
        }
    }

    pub fn day(self) -> u32 {
        if self.t == 0 {
            0
        } else {
            (self.t - 1) / PHASES_PER_DAY
        }
    }

    pub fn weekday(self) -> Weekday {
        Weekday::from_index(self.day())
    }

    pub fn is_weekday(self) -> bool {
        self.weekday() < Weekday::Sat
    }

    /// Index of the period within its week, 0..21 (Monday phase 1 is 0).
    pub fn week_slot(self) -> u32 {
        (self.t.max(1) - 1) % PERIODS_PER_WEEK
    }

    /// Phase 1 from Monday to Friday: regular work, school and payments.
    pub fn is_work_phase(self) -> bool {
        self.phase() == 1 && self.is_weekday()
    }

    /// Phase 3 from Monday to Friday: goods market and rents.
    pub fn is_consumption_phase(self) -> bool {
        self.phase() == 3 && self.is_weekday()
    }

    pub fn is_week_end(self) -> bool {
        self.phase() == 3 && self.weekday() == Weekday::Sun
    }

    /// Period at which a given day starts.
    pub fn first_period_of_day(day: u32) -> u32 {
        day * PHASES_PER_DAY + 1
    }
}

/// Slot of a period in the 21-slot income window.
pub fn window_slot(t: u32) -> usize {
    (t % PERIODS_PER_WEEK) as usize
}
