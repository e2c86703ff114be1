use thiserror::Error;

/// Errors shared by all gmelab modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max elementwise deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1 within tolerance")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("factor index {index} out of range for {count} factors")]
    FactorOutOfRange { index: usize, count: usize },

    #[error("keep set must be a nonempty subset of the factor indices")]
    EmptyKeep,

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("total dimension {dim} exceeds the supported maximum of 256")]
    DimTooLarge { dim: usize },

    #[error("operation requires at least two groups under the active grouping")]
    SingleGroup,

    #[error("unknown group label `{0}`")]
    UnknownLabel(String),

    #[error("invalid bipartition: {0}")]
    InvalidCut(String),

    #[error("unknown state name `{0}`")]
    UnknownState(String),

    #[error("parameter {name} = {value} out of range")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("local map must not enlarge its space ({rows} rows > {cols} columns)")]
    MapShape { rows: usize, cols: usize },

    #[error("local map operator norm {norm} exceeds 1")]
    MapNotContractive { norm: f64 },

    #[error("map for party `{party}` expects input dimension {expected}, party has {got}")]
    MapDimMismatch {
        party: String,
        expected: usize,
        got: usize,
    },

    #[error("projection incompatible with state: success probability {prob:.3e} below 1e-14")]
    IncompatibleProjection { prob: f64 },

    #[error("expected exactly {expected} groups, found {got}")]
    GroupCount { expected: usize, got: usize },

    #[error("cross-location aggregation requires every party to hold the same particle count")]
    UnequalParticleCounts,

    #[error("witness construction requires at least one correction")]
    NoCorrections,

    #[error("restarts must be at least 1")]
    RestartsTooFew,

    #[error("history too short: {len} entries after trimming, need at least 9")]
    HistoryTooShort { len: usize },

    #[error("degenerate history: squared distances have no variation")]
    DegenerateHistory,
}

pub type Result<T> = std::result::Result<T, Error>;
