use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),

    #[error("line {line}: response `{value}` is not a finite number")]
    NonNumeric { line: usize, value: String },

    #[error("group too small: `{label}` has {n} observation(s), at least 2 are required")]
    GroupTooSmall { label: String, n: usize },

    #[error("need at least 2 groups, found {0}")]
    TooFewGroups(usize),

    #[error("control label `{0}` not present in data")]
    UnknownControl(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("invalid contrast matrix: {0}")]
    InvalidContrast(String),

    #[error("correlation matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("correlation matrix is singular or nearly so (pivot {0:e})")]
    SingularCorrelation(f64),

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("no root of the probability equation inside [{lo}, {hi}] (level {level})")]
    RootNotBracketed { lo: f64, hi: f64, level: f64 },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveSemidefinite(_)
                | Error::SingularCorrelation(_)
                | Error::DegenerateVariance(_)
                | Error::RootNotBracketed { .. }
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
