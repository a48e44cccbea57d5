use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("missing config key `{0}`")]
    MissingKey(String),
    #[error("config value {key} = {value} out of range (expected {expected})")]
    OutOfRange {
        key: String,
        value: f64,
        expected: &'static str,
    },
    #[error("{what} sum to {sum}, expected 1")]
    SharesDoNotSum { what: String, sum: f64 },
    #[error("inconsistent config: {0}")]
    Inconsistent(String),
    #[error("parameter `{0}` cannot be swept (allowed: beta, epsilon, omega, kappa, mu_l, sigma, population)")]
    NotSweepable(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario `{name}`; available: {available}")]
    Unknown { name: String, available: String },
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("scenario events must be sorted by day (day {later} follows day {earlier})")]
    Unsorted { earlier: u32, later: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("household filling failed after {attempts} attempts: {reason}")]
    InfeasibleHouseholds { attempts: u32, reason: String },
    #[error("no commercial leisure facility exists, so the leisure price is undefined")]
    NoLeisureFacilities,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("money not conserved in period {period}: total {total}, expected {expected}")]
    MoneyDrift {
        period: u32,
        total: f64,
        expected: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("each sample needs at least two observations")]
    TooFewObservations,
    #[error("both samples have zero variance, the Welch statistic is undefined")]
    ZeroVariance,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("unknown run filter `{0}` (expected extant300, eliminated100 or none)")]
    UnknownFilter(String),
    #[error("unknown fiscal mode `{0}` (expected zero-deficit or fixed)")]
    UnknownFiscalMode(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed batch: {0}")]
    Batch(String),
}
