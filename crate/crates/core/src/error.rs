use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported root system type `{0}`")]
    UnsupportedType(String),

    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not a root of the system")]
    NotARoot,

    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),

    #[error("weight {0:?} lies on a chamber wall")]
    OnWall(Vec<i64>),

    #[error("function is not Weyl-alternating")]
    NotAlternating,

    #[error("nonzero coefficient {coeff:e} at wall weight {weight:?}")]
    WallCoefficient { weight: Vec<i64>, coeff: f64 },

    #[error("Laurent division did not terminate with zero remainder")]
    InexactDivision,

    #[error("heat parameter must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("states carry different heat parameters ({0} vs {1})")]
    HbarMismatch(f64, f64),

    #[error("invalid cotangent point: {0}")]
    InvalidCotangentPoint(String),

    #[error("momentum norm {0:e} exceeds the zero-set tolerance")]
    NotInZeroSet(f64),

    #[error("joint diagonalization failed (residual {0:e})")]
    JointDiagonalization(f64),

    #[error("matrix does not normalize the diagonal torus (residual {0:e})")]
    NotNormalizer(f64),

    #[error("point lies in the singular band (|sigma| = {0:e})")]
    SingularPoint(f64),

    #[error("state is zero")]
    ZeroState,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
