use alloc::string::String;
use core::fmt;

/// Errors produced by the simulation and analysis operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(String),
    /// Input data is unusable (wrong length, zero variance, ...).
    InvalidInput(String),
    /// A numerical routine failed to converge or produced a non-finite value.
    Numerical(String),
    /// Too few pilot symbols for the requested estimator.
    InsufficientPilots { required: usize, found: usize },
    /// Shot-noise calibration could not be established.
    CalibrationFailure(String),
    /// A covariance matrix violated the uncertainty principle
    /// (symplectic eigenvalue below 1).
    Physicality(String),
    /// Maximum-likelihood fit ran out of iterations; carries the best point
    /// found so far as `(sigma2_ln, gamma, neg_log_likelihood)`.
    FitNonConvergence {
        sigma2_ln: f64,
        gamma: f64,
        neg_log_likelihood: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Numerical(m) => write!(f, "numerical error: {m}"),
            Error::InsufficientPilots { required, found } => {
                write!(f, "insufficient pilots: need {required}, found {found}")
            }
            Error::CalibrationFailure(m) => write!(f, "calibration failure: {m}"),
            Error::Physicality(m) => write!(f, "unphysical state: {m}"),
            Error::FitNonConvergence {
                sigma2_ln,
                gamma,
                neg_log_likelihood,
            } => write!(
                f,
                "fit did not converge (best so far: sigma2_ln={sigma2_ln}, gamma={gamma}, nll={neg_log_likelihood})"
            ),
        }
    }
}
