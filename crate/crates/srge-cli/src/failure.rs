//! Process-level error classification: usage problems exit with code 2,
//! domain and engine problems with code 1.

use std::fmt;

/// A failed run, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unparseable specs or configs; exit code 2.
    Usage(String),
    /// Engine or domain errors on valid input; exit code 1.
    Domain(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) | Failure::Domain(msg) => write!(f, "{msg}"),
        }
    }
}

impl Failure {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

impl From<srge::Error> for Failure {
    fn from(err: srge::Error) -> Self {
        match err {
            srge::Error::StateSpec { .. }
            | srge::Error::InvalidParameter { .. }
            | srge::Error::MomentumState { .. } => Failure::Usage(err.to_string()),
            _ => Failure::Domain(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Domain(err.to_string())
    }
}
