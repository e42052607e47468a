use thiserror::Error;

/// Errors produced by domain construction, projections, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain of {n} dimensions with {m} states needs more than {cap} points (set SDIST_MAX_POINTS to raise the cap)")]
    DomainTooLarge { n: usize, m: usize, cap: usize },

    #[error("coordinate {value} at dimension {dim} is out of range for {states} states")]
    CoordinateOutOfRange {
        dim: usize,
        value: u32,
        states: usize,
    },

    #[error("point has {got} coordinates, domain has {expected} dimensions")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("flat index {index} out of range for a domain with {points} points")]
    IndexOutOfRange { index: usize, points: usize },

    #[error("support index {index} out of range for {n} dimensions")]
    SupportOutOfRange { index: usize, n: usize },

    #[error("support indices contain a duplicate: {index}")]
    DuplicateSupportIndex { index: usize },

    #[error("functions live on different domains")]
    DomainMismatch,

    #[error("value vector has length {got}, domain has {expected} points")]
    LengthMismatch { got: usize, expected: usize },

    #[error("empty input")]
    Empty,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("negative mass {value} at index {index} (below the clamping tolerance)")]
    NegativeMass { index: usize, value: f64 },

    #[error("total mass {sum} is not 1 within tolerance")]
    NotNormalized { sum: f64 },

    #[error("mass {mass} found outside the declared support")]
    MassOutsideSupport { mass: f64 },

    #[error("sparsity level {k} out of range [1, {max}]")]
    SparsityOutOfRange { k: usize, max: usize },

    #[error("instance too large: {evals} support evaluations exceed the enumeration guard of {guard}")]
    InstanceTooLarge { evals: u128, guard: u64 },

    #[error("KL target has zero mass at index {index}; the target must be strictly positive")]
    KlZeroTarget { index: usize },

    #[error("restricted domain carries no target mass; restricted KL minimizer is undefined")]
    ZeroRestrictedMass,

    #[error("approximation ratio undefined: the oracle distance is zero")]
    RatioUndefined,

    #[error("ground set of {len} integers exceeds the subset-sum guard of {guard}")]
    GroundSetTooLarge { len: usize, guard: usize },

    #[error("declared support has size {expected} but the point's support has size {actual}")]
    SupportSizeMismatch { expected: usize, actual: usize },

    #[error("support of size {len} exceeds the margin-enumeration guard of {guard}")]
    MarginGuardExceeded { len: usize, guard: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed function file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed record at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
