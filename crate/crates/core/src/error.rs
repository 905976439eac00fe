use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point:?} lies outside the domain of the function")]
    OutsideDomain { point: Vec<f64> },

    #[error("support of the trial function crosses the midline of the interval domain")]
    MidlineCrossing,

    #[error("support {support:?} is not contained in the domain {domain}")]
    SupportOutsideDomain {
        support: Vec<(f64, f64)>,
        domain: String,
    },

    #[error("quadrature did not converge after {levels} refinements (last two values {previous:e}, {last:e})")]
    NonConvergence {
        levels: u32,
        previous: f64,
        last: f64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("scaling sweep failed (largest reliable lambda {largest_reliable_lambda:?}): {cause}")]
    SweepFailed {
        largest_reliable_lambda: Option<f64>,
        cause: Box<Error>,
    },

    #[error("search failed: every one of {evaluations} evaluations failed")]
    SearchFailed { evaluations: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        expected: &'static str,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            expected,
        }
    }
}
