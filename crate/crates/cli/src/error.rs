use std::fmt;

use hslab_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration.
    Usage(String),
    /// A mathematical assertion did not hold.
    Math(String),
    /// Quadrature or search did not converge.
    NonConvergence(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Math(_) => EXIT_MATH,
            CliError::NonConvergence(_) => EXIT_NONCONVERGENCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Math(m) => write!(f, "assertion failed: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Exit code a library error maps to.
pub fn code_for(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::SearchFailed { .. } => EXIT_NONCONVERGENCE,
        Error::SweepFailed { cause, .. } => code_for(cause),
        Error::Degenerate(_) => EXIT_MATH,
        _ => EXIT_USAGE,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match code_for(&e) {
            EXIT_NONCONVERGENCE => CliError::NonConvergence(msg),
            EXIT_MATH => CliError::Math(msg),
            _ => CliError::Usage(msg),
        }
    }
}

/// Most severe of two exit codes: usage beats non-convergence beats math.
pub fn worst(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        EXIT_USAGE => 3,
        EXIT_NONCONVERGENCE => 2,
        EXIT_MATH => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}
