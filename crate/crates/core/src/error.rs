use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("optical amplitudes are not normalized: sum |a_n|^2 = {0}")]
    NotNormalized(f64),

    /// The f-coefficient matrices violate f[n][m] = conj(f[m][n]).
    #[error("f-coefficients not conjugate-symmetric at entry ({n},{m}): residual {residual:e}")]
    NonHermitianInput { n: usize, m: usize, residual: f64 },

    #[error("degenerate squeezing parameters: {0}")]
    DegenerateSqueezing(String),

    /// Re(2 f2 sigma^2 + 1) <= 0, so the Gaussian prior integral diverges.
    #[error("Gaussian integral diverges at entry ({n},{m}): Re(sigma'^2) = {re:e}")]
    BranchFailure { n: usize, m: usize, re: f64 },

    /// Operator equation has no bounded solution in the (i,j) eigen-sector of Gamma_0.
    #[error("singular eigen-pair ({i},{j}) of Gamma_0: lambda_i + lambda_j = {lambda_sum:e}, |Gamma_1| = {value:e}")]
    SingularPair {
        i: usize,
        j: usize,
        lambda_sum: f64,
        value: f64,
    },

    #[error("derivative carries no information at g = {g}: Tr(rho L^2) = {denom:e}")]
    DegenerateDerivative { g: f64, denom: f64 },

    #[error("mechanical truncation n_mech = {n_mech} too small: tail population {tail:e}")]
    TruncationOverflow { n_mech: usize, tail: f64 },

    #[error("adaptive quadrature did not converge after {intervals} intervals (error estimate {error:e})")]
    QuadratureNonConvergence { intervals: usize, error: f64 },

    /// A trace that must be real carried an imaginary residue above tolerance.
    #[error("numerical consistency failure in {what}: imaginary part {imag:e}")]
    NumericalConsistency { what: &'static str, imag: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
