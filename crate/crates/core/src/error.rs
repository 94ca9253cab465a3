use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The variants split into three families that the command-line front end maps
/// onto distinct exit codes: argument/regime violations, numerical failures and
/// I/O or cache problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A formula was requested outside the regime where it is defined.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Refinement did not settle; carries the last two estimates.
    #[error("no convergence after {doublings} doublings (last estimates {last:e} and {previous:e})")]
    Accuracy {
        doublings: usize,
        last: f64,
        previous: f64,
    },

    #[error("ill-conditioned factorisation: pivot magnitude {pivot:e}")]
    Conditioning { pivot: f64 },

    /// det(I - K) came out non-positive, which the operator bound forbids.
    #[error("determinant sign violation: det(I-K) <= 0 (negative pivot count {negative_pivots})")]
    Sign { negative_pivots: usize },

    #[error("Newton iteration stalled after {iterations} iterations (residual {residual:e})")]
    Newton { iterations: usize, residual: f64 },

    #[error("sigma-PV branch inconsistency at tau = {tau}: radicand {radicand:e}")]
    Branch { tau: f64, radicand: f64 },

    /// b² = −∂²ₓ log D came out negative on a finite-difference stencil.
    #[error("negative b^2 = {b2:e} on the stencil around (x, s) = ({x}, {s})")]
    NegativeSquare { x: f64, s: f64, b2: f64 },

    /// Two independent evaluations of the same quantity did not agree.
    #[error("{what}: routes disagree ({a:e} vs {b:e}, tolerance {tol:e})")]
    Consistency {
        what: &'static str,
        a: f64,
        b: f64,
        tol: f64,
    },

    #[error("cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Regime(_) | Error::OutOfRange { .. }
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. }
                | Error::Conditioning { .. }
                | Error::Sign { .. }
                | Error::Newton { .. }
                | Error::Branch { .. }
                | Error::Consistency { .. }
                | Error::NegativeSquare { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
