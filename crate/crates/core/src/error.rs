use std::path::PathBuf;

use crate::solver::SolverTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("degenerate channel: user {user} has a zero-norm channel vector")]
    DegenerateChannel { user: usize },

    #[error("unbounded power update for user {user}: denominator is zero (eta, phi and cross-gains all vanish)")]
    UnboundedUpdate { user: usize },

    /// Rate constraints could not be met: a multiplier blew up or the
    /// dual loop hit its cap with the constraint still violated.
    #[error("possibly infeasible minimum rate: worst relative shortfall {shortfall:.3e}")]
    PossiblyInfeasible {
        shortfall: f64,
        trace: Box<SolverTrace>,
    },

    #[error("Dinkelbach iteration did not converge within {iterations} outer iterations")]
    NotConverged {
        iterations: usize,
        trace: Box<SolverTrace>,
    },

    #[error("grid search: {0}")]
    Grid(String),

    #[error("infeasible at grid resolution: no grid point satisfies the constraints")]
    GridInfeasible,

    #[error("config: key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Configuration and parameter errors, as opposed to failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParam { .. })
    }
}
