use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is antipodal to the projection pole")]
    Antipode,
    #[error("kernel singularity: 1 - xi.eta = {0:e}")]
    Singularity(f64),
    #[error("point lies outside the cap")]
    OutsideCap,
    #[error("point lies inside the cap but must be exterior")]
    InsideCap,
    #[error("point too close to the boundary (distance {distance:e}, required {required:e})")]
    NearBoundary { distance: f64, required: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vector sample {index} is not tangential (|v.n| = {residual:e})")]
    NotTangential { index: usize, residual: f64 },
    #[error("expected {expected} samples")]
    WrongKind { expected: &'static str },
    #[error("compatibility condition violated: boundary integral = {0:e}")]
    Compatibility(f64),
    #[error("numerically singular system: {0}")]
    SingularSystem(String),
    #[error("cap comes within {0:.3} of the equator (|xi.e3| must stay >= 0.15)")]
    EquatorProximity(f64),
    #[error("displacement {tau:e} is below the resolution floor {floor:e}")]
    BelowResolution { tau: f64, floor: f64 },
    #[error("point coincides with a source or vortex")]
    Coincidence,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
