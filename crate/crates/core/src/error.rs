use thiserror::Error;

/// Broad failure classes. The CLI maps these onto its exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A growth or threshold hypothesis required by a construction does not hold.
    Hypothesis,
    /// A configured size cap would be exceeded.
    Resource,
    /// Input data could not be parsed or violates a structural invariant.
    Malformed,
    /// A caller passed parameters that violate an operation's precondition.
    Precondition,
    /// An emitted certificate failed its own re-verification.
    Verification,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge ({0}, {1}) given twice with lengths differing or in a long-edge graph")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) has zero length")]
    ZeroLength(usize, usize),
    #[error("{what} would reach {size}, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    #[error("sampled profile requested with an empty center list")]
    EmptySample,
    #[error("degenerate slope window: {0}")]
    DegenerateWindow(String),
    #[error("threshold decisions need an exact profile; got a sampled one")]
    SampledProfile,
    #[error("growth hypothesis fails at level {level}: {detail}")]
    Hypothesis { level: u32, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no thickness-{scale} annulus fits between radii {inner} and {outer}")]
    NoAnnulus { inner: u64, outer: u64, scale: u32 },
    #[error("averaging chain broken at swap centered on {center}: {detail}")]
    AveragingChain { center: usize, detail: String },
    #[error("graph carries no junction tags; not a tagged subdivision")]
    NotSubdivision,
    #[error("cover failed verification: {0}")]
    Verification(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Hypothesis { .. } => ErrorKind::Hypothesis,
            Error::CapExceeded { .. } => ErrorKind::Resource,
            Error::SelfLoop(_)
            | Error::VertexOutOfRange { .. }
            | Error::DuplicateEdge(..)
            | Error::ZeroLength(..)
            | Error::Malformed(_)
            | Error::EmptyCloud
            | Error::InvalidMetric(_)
            | Error::NotSubdivision
            | Error::Json(_) => ErrorKind::Malformed,
            Error::Verification(_) | Error::AveragingChain { .. } => ErrorKind::Verification,
            Error::EmptySample
            | Error::DegenerateWindow(_)
            | Error::SampledProfile
            | Error::Precondition(_)
            | Error::NoAnnulus { .. } => ErrorKind::Precondition,
            Error::Io(_) => ErrorKind::Io,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
