use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {value} on axis {axis} is outside [0, 1)")]
    CoordinateOutOfRange { axis: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: u32, found: u32 },

    #[error("spatial dimension {dim} unsupported (must be 1..=4)")]
    UnsupportedDimension { dim: u32 },

    #[error("depth {depth} exceeds the maximum of {max}")]
    DepthOutOfRange { depth: u32, max: u32 },

    #[error("invalid weight model: {reason}")]
    InvalidModel { reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("operation not supported for set `{kind}`")]
    UnsupportedSet { kind: String },

    #[error("node budget exceeded enumerating `{set}` to depth {depth}: visited {visited}, budget {budget}")]
    NodeBudgetExceeded {
        set: String,
        depth: u32,
        visited: u64,
        budget: u64,
    },

    #[error("scaling fit needs at least {need} depths, table has {have} in range")]
    InsufficientDepths { have: usize, need: usize },

    #[error("dimension estimation failed: {diagnostics}")]
    EstimationFailed { diagnostics: String },

    #[error("config error in `{field}`: {reason}")]
    ConfigParse { field: String, reason: String },

    #[error("refusing replay: {what} was `{found}`, this build has `{expected}`")]
    VersionMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
