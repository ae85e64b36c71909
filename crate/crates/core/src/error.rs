use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid spectral data: {}", .0.join("; "))]
    InvalidData(Vec<String>),

    #[error("matrix is not symmetric (max |A - A^T| = {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("extracted phase |psi| = {modulus} exceeds 1 at node {node}")]
    PhaseOutOfRange { node: f64, modulus: f64 },

    #[error("total spectral weight {total} deviates from 1")]
    MassDefect { total: f64 },

    #[error("eigenvalue {value} of |B| has multiplicity {multiplicity}; the cyclic vector cannot generate it")]
    NonCyclic { value: f64, multiplicity: usize },

    #[error("off-diagonal coefficient a[{index}] = {value} is not positive")]
    NonPositiveCoupling { index: usize, value: f64 },

    #[error("Jacobi parameters too short: need {needed} entries in `{field}`, have {have}")]
    ParametersTooShort { field: &'static str, needed: usize, have: usize },

    #[error("sesquilinear form is not positive: [r,r] = {value:e}")]
    FormNotPositive { value: f64 },

    #[error("{what} = {value} outside its domain {domain}")]
    OutOfDomain { what: &'static str, value: f64, domain: &'static str },

    #[error("evaluation too close to a pole (|denominator| = {denominator:e})")]
    NearPole { denominator: f64 },

    #[error("quadrature renormalisation factor {factor} signals an inaccurate rule")]
    Quadrature { factor: f64 },

    #[error("gauge rotation by alpha = {alpha} cannot keep psi(0) = 1")]
    GaugeAtZero { alpha: f64 },

    #[error("eigen-solver did not converge")]
    EigenSolver,

    #[error("singular system in banded solve at row {row}")]
    Singular { row: usize },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Input problems as opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidData(_)
                | Error::NotSymmetric { .. }
                | Error::NotSquare { .. }
                | Error::NonPositiveCoupling { .. }
                | Error::ParametersTooShort { .. }
                | Error::OutOfDomain { .. }
                | Error::GaugeAtZero { .. }
                | Error::Format(_)
                | Error::Json(_)
        )
    }
}
