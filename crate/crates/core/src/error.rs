use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric")]
    NonSymmetric,

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("linear objective is unbounded below on the polyhedron")]
    Unbounded,

    #[error("polyhedron is unbounded, operation requires a polytope")]
    UnboundedPolyhedron,

    #[error("cone is not strongly convex")]
    NotStronglyConvex,

    #[error("operation only supported up to ambient dimension {cap}, got {got}")]
    DimensionCap { cap: usize, got: usize },

    #[error("class is not big on this model")]
    NotBig,

    #[error("class is not nef against the curve catalog")]
    NotNef,

    #[error("solved coefficient of curve `{curve}` is negative: curve catalog is incomplete")]
    IncompleteCatalog { curve: String },

    #[error("intersection form on the support {support:?} is not negative definite")]
    SupportNotNegativeDefinite { support: Vec<String> },

    #[error("point lies outside the open domain cone")]
    OutOfDomain,

    #[error("invalid cube region: {reason}")]
    InvalidCube { reason: String },

    #[error("approximation stream stalled before reaching the requested precision")]
    StreamStalled,

    #[error("ideal has infinite colength, Samuel multiplicity is undefined")]
    InfiniteColength,

    #[error("class has no effective representative")]
    NotEffective,

    #[error("ideal of degree {degree:?} is not available in this presentation")]
    MissingDegree { degree: Vec<i64> },

    #[error("class lies on a chamber wall")]
    WallClass,

    #[error("parameter out of range: {reason}")]
    OutOfRange { reason: String },

    #[error("incompatible radicands {0} and {1} in surd arithmetic")]
    RadicandMismatch(u64, u64),

    #[error("verification failed at degree {witness:?}")]
    VerificationBound { witness: Vec<i64> },

    #[error("model invariant violated: {reason}")]
    ModelInvariant { reason: String },

    #[error("stabilization did not converge within {limit} rounds")]
    StabilizationLimit { limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse_json(err: &serde_json::Error) -> Self {
        Error::Parse(format!(
            "line {}, column {}: {}",
            err.line(),
            err.column(),
            err
        ))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
