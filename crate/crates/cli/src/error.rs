use std::fmt;

/// Failure classes mapped onto the exit-code contract. Tolerance violations
/// (exit 2) are reported through records, not errors.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an impossible request (exit 64).
    Usage(String),
    /// The SDP solver did not return a usable point (exit 3).
    Solver(String),
    /// The request exceeds a size or time limit (exit 64 outside `reproduce`).
    Budget(String),
    /// I/O and everything else (exit 1).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Budget(_) => 64,
            CliError::Solver(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Budget(m) => write!(f, "over budget: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<gesq_core::Error> for CliError {
    fn from(e: gesq_core::Error) -> Self {
        use gesq_core::Error as E;
        match e {
            E::Solver(_) => CliError::Solver(e.to_string()),
            E::Budget(m) => CliError::Budget(m),
            E::InvalidParameter(_)
            | E::DimensionMismatch { .. }
            | E::CutOutOfRange(..)
            | E::NotApplicable(_)
            | E::Inexact(_) => CliError::Usage(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(format!("csv: {e}"))
    }
}
