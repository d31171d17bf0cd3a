use thiserror::Error;

/// Precondition failures of the numeric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("bed utilization rate must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("bed count must be positive, got {0}")]
    NonPositiveBeds(f64),
    #[error("resident population must be positive")]
    NonPositivePopulation,
    #[error("net served admissions must be positive, got {0}")]
    NonPositiveNetServed(i64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

/// Errors raised while reading the interchange files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("duplicate DRG code {0}")]
    DuplicateCode(String),
    #[error("DRG code {0} appears in both LEA lists")]
    OverlappingLists(String),
    #[error("{0}")]
    Document(String),
}

impl ParseError {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario spec: {0}")]
    InvalidSpec(String),
    #[error("step {step}: {class} DH admissions are not available in the source data")]
    UnavailableData { step: u8, class: String },
    #[error("scenario infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
