use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice basis is singular: |det| = {det:e}, tolerance {tol:e}")]
    SingularBasis { det: f64, tol: f64 },
    #[error("point {point:?} lies outside the potential's domain")]
    OutOfCell { point: Vec<f64> },
    #[error("potential carries no gradient data")]
    NoGradient,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("sample resolution {resolution} is below the aliasing bound {required}")]
    AliasingRisk { resolution: usize, required: usize },
    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("eigenvalue {value:e} sits on the Morse classification boundary -{eps:e}")]
    BoundaryAmbiguity { value: f64, eps: f64 },
    #[error("eigenvalue curve matching failed at grid step {step}")]
    MatchFailure { step: usize },
    #[error("frame is not Lagrangian (residual {residual:e})")]
    NotLagrangian { residual: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no spectral gap found near t = {t}")]
    NoGapFound { t: f64 },
    #[error("crossing at t = {t} is not regular (smallest |form eigenvalue| {min_abs:e})")]
    NonRegular { t: f64, min_abs: f64 },
    #[error("graph representation breaks down near t = {t}")]
    GraphBreakdown { t: f64 },
    #[error("t = {t} is not a crossing")]
    NotACrossing { t: f64 },
    #[error("integrator too coarse: step doubling changed traces by {change:e}")]
    StepTooCoarse { change: f64 },
    #[error("four-segment Maslov total is {total}: {ledger}")]
    SumViolation { total: i64, ledger: String },
    #[error("hypothesis {0} does not hold: {1}")]
    HypothesisViolation(String, String),
    #[error("unresolved crossing near t = {t}: {reason}")]
    UnresolvedCrossing { t: f64, reason: String },
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
