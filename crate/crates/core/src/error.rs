use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsolvable pursuit: pursuer speed {pursuer_speed} does not exceed target speed {target_speed}")]
    UnsolvablePursuit { pursuer_speed: f64, target_speed: f64 },
    #[error("arena radius must be positive and finite, got {0}")]
    InvalidArena(f64),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid target {0}")]
    InvalidTarget(u64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("replay divergence at event {index}: expected `{expected}`, got `{actual}`")]
    ReplayDivergence {
        index: usize,
        expected: String,
        actual: String,
    },
    #[error("unsupported log format version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("response time must be non-negative, got {0}")]
    NegativeResponseTime(f64),
    #[error("unknown agent kind `{0}`")]
    UnknownAgent(String),
    #[error("unknown proxy kind `{0}`")]
    UnknownProxy(String),
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty round: no target value was available")]
    EmptyRound,
    #[error("log lacks trajectory snapshots")]
    MissingSnapshots,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum PreferenceError {
    #[error("feature names differ between records: {0}")]
    FeatureMismatch(String),
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("missing feature `{0}`")]
    MissingFeature(String),
    #[error("sampler did not converge: {0}")]
    NonConvergence(String),
    #[error("cannot make {folds} folds from {records} records")]
    TooManyFolds { folds: usize, records: usize },
    #[error("invalid binomial counts k={k}, n={n}")]
    InvalidCounts { k: u64, n: u64 },
    #[error("invalid choice data: {0}")]
    InvalidData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("agent pair must contain two distinct agents")]
    IdenticalAgents,
    #[error("counterbalance index must be in 0..=3, got {0}")]
    CounterbalanceIndex(u8),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("invalid survey response: {0}")]
    InvalidSurvey(String),
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
    #[error("incomplete session {0}")]
    IncompleteSession(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
