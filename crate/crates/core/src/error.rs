use thiserror::Error;

/// Errors raised by the geometry, scalar and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero bivector has no support")]
    ZeroBivector,

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),

    #[error("matrix is not orthogonal (max |MᵀM - I| = {0:e})")]
    NotOrthogonal(f64),

    #[error("{what} must be {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("pole of P at theta = {0}")]
    PoleOfP(f64),

    #[error("inadmissible triple: {0}")]
    Inadmissible(String),

    #[error("point is not on the cut locus: {0}")]
    NotCutPoint(String),

    #[error("extremal with phi = 0 has no finite cut point")]
    NoFiniteCutPoint,

    #[error("covector with xi = 0 generates no curve")]
    ZeroCovector,

    #[error("target is the origin")]
    OriginTarget,

    #[error("shooting did not converge: best residual {best_residual:e} after {restarts} restarts")]
    NoConvergence { best_residual: f64, restarts: usize },

    #[error("sigma = {sigma} outside the admissible range [-{max}, {max}]")]
    SigmaOutOfRange { sigma: f64, max: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
