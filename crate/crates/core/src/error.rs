use core::fmt;

use crate::sdp::SdpStatus;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operator dimensions do not match what the operation expects.
    DimensionMismatch { expected: usize, found: usize },
    /// Matrix is not Hermitian (or symmetric) within tolerance.
    NotHermitian { deviation: f64 },
    /// Operator is not a density matrix: negative spectrum or wrong trace.
    NotDensityMatrix { min_eigenvalue: f64, trace: f64 },
    /// Operator is not an effect: spectrum outside `[0, 1]`.
    NotEffect { min_eigenvalue: f64, max_eigenvalue: f64 },
    /// Symmetrized strategy parameters violate `0 ≼ block ≼ 1` or `0 ≤ ω ≤ 1`.
    InvalidStrategy { reason: &'static str },
    /// Scenario or state parameter outside its domain.
    OutOfDomain { parameter: &'static str, value: f64 },
    /// Malformed SDP problem data.
    InvalidProblem { reason: &'static str },
    /// Malformed solver settings.
    InvalidSettings { reason: &'static str },
    /// A solution was required to be optimal but was not.
    NotOptimal { status: SdpStatus },
    /// A point `(z, x)` outside the LMI-feasible set of the reduced problem.
    InfeasiblePoint { z: f64, x: f64 },
    /// `x = 0` was passed to the non-commuting inner solution.
    CommutingStrategy,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::NotDensityMatrix {
                min_eigenvalue,
                trace,
            } => write!(
                f,
                "not a density matrix (min eigenvalue {min_eigenvalue:e}, trace {trace})"
            ),
            Error::NotEffect {
                min_eigenvalue,
                max_eigenvalue,
            } => write!(
                f,
                "not an effect (spectrum [{min_eigenvalue:e}, {max_eigenvalue}])"
            ),
            Error::InvalidStrategy { reason } => write!(f, "invalid symmetrized strategy: {reason}"),
            Error::OutOfDomain { parameter, value } => {
                write!(f, "parameter {parameter} = {value} is outside its domain")
            }
            Error::InvalidProblem { reason } => write!(f, "invalid SDP problem: {reason}"),
            Error::InvalidSettings { reason } => write!(f, "invalid solver settings: {reason}"),
            Error::NotOptimal { status } => write!(f, "solution is not optimal (status {status})"),
            Error::InfeasiblePoint { z, x } => {
                write!(f, "point (z = {z}, x = {x}) violates the strategy LMI")
            }
            Error::CommutingStrategy => {
                write!(f, "x = 0 is the commuting case; use the commuting inner solution")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
