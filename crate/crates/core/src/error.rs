use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {refinements} refinements")]
    NonConvergent {
        value: f64,
        error: f64,
        refinements: usize,
    },
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("radial ODE step too coarse: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepTooCoarse { estimate: f64, tolerance: f64 },
    #[error("discrete operator is not positive definite (pivot {pivot:e} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },
    #[error("matrix is not symmetric: |M[{row},{col}] - M[{col},{row}]| = {defect:e}")]
    NotSymmetric { row: usize, col: usize, defect: f64 },
    #[error("eigensolver did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("mesh too coarse: refinements disagree by {discrepancy:e} (relative)")]
    MeshTooCoarse { discrepancy: f64 },
    #[error("hard-core potentials have no L1 scattering profile; truncate the potential first")]
    HardCoreUnsupported,
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),
    #[error("no admissible value found: {0}")]
    NotFound(String),
    #[error("potential range too large for the box: rho_mu a R^2 = {value:e} > (K D)^2 = {limit:e}")]
    RangeTooLarge { value: f64, limit: f64 },
    #[error("invalid Bogoliubov coefficients A = {a}, B = {b}: need A > 0 and -A < B <= A")]
    InvalidCoefficients { a: f64, b: f64 },
    #[error("Fock truncation not converged: n_max {n_max} -> {doubled} moved the energy by {shift:e}")]
    TruncationNotConverged {
        n_max: usize,
        doubled: usize,
        shift: f64,
    },
    #[error("outside the admissible regime: {0}")]
    RegimeViolation(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
