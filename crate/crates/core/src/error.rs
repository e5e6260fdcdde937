use thiserror::Error;

/// Errors raised by the library. The CLI maps [`Error::is_resource_cap`]
/// failures to a distinct exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("dimension {0} outside 1..=63")]
    InvalidDimension(u32),
    #[error("bitmask {bits:#x} has bits outside dimension {n}")]
    BitsOutOfRange { bits: u64, n: u32 },
    #[error("radius {r} exceeds dimension {n}")]
    RadiusTooLarge { r: u32, n: u32 },
    #[error("cannot drop {d} coordinates from dimension {n}")]
    ProjectionTooDeep { d: u32, n: u32 },
    #[error("grid partition needs m <= n (got m={m}, n={n})")]
    GridShape { m: u32, n: u32 },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("alpha {0} outside (0, 1]")]
    InvalidAlpha(f64),
    #[error("vertex {0} is not a member of the vertex set")]
    NotAMember(String),
    #[error("endpoints coincide")]
    SameVertex,
    #[error("distance {d} outside 1..={n}")]
    DistanceOutOfRange { d: u32, n: u32 },
    #[error("distance parameter {0} is even; Q_n^d is disconnected")]
    EvenDistance(u32),
    #[error("Q_{n}^{d} is disconnected: {unreached} vertices unreached")]
    Disconnected { n: u32, d: u32, unreached: u64 },
    #[error("expected Hamming distance {expected}, found {found}")]
    DistanceMismatch { expected: u32, found: u32 },
    #[error("pure paths need 5d <= n (d={d}, n={n})")]
    PurePathsDoNotFit { d: u32, n: u32 },
    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap { what: &'static str, size: u64, cap: u64 },
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("congestion ledger carries no load")]
    EmptyLedger,
    #[error("graph has fewer than two vertices")]
    TooFewVertices,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by an input exceeding a computational budget.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::SizeCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
