use std::fmt;

use spectrakit::{AnalysisError, ComplexityError, CtmError, GraphError, SpectraError};

/// Failure category; each maps to one process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Missing,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Usage,
            message: message.into(),
        }
    }

    pub fn missing(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Missing,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Numerical,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Usage => 2,
            Kind::Missing => 3,
            Kind::Numerical => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::InvalidParameter(_) | SpectraError::RankOutOfRange { .. } => {
                CliError::usage(e.to_string())
            }
            _ => CliError::numerical(e.to_string()),
        }
    }
}

impl From<ComplexityError> for CliError {
    fn from(e: ComplexityError) -> Self {
        match e {
            ComplexityError::MissingTable | ComplexityError::MissingBlock { .. } => {
                CliError::missing(format!("{e}; {TABLE_HINT}"))
            }
            ComplexityError::UndefinedNormalization => CliError::numerical(e.to_string()),
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<CtmError> for CliError {
    fn from(e: CtmError) -> Self {
        match e {
            CtmError::InvalidParameter(_) => CliError::usage(e.to_string()),
            CtmError::Parse { .. } | CtmError::Inconsistent(_) => {
                CliError::missing(format!("unusable table: {e}"))
            }
            CtmError::EmptyTable => CliError::numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Spectra(e) => e.into(),
            AnalysisError::Complexity(e) => e.into(),
            AnalysisError::Graph(e) => e.into(),
            AnalysisError::DegenerateCorrelation => CliError::numerical(e.to_string()),
            AnalysisError::InvalidParameter(_) => CliError::usage(e.to_string()),
        }
    }
}

pub const TABLE_HINT: &str = "build a table with `spectrakit ctm-build --states 2 -o table.csv`, \
then pass --table table.csv or set SPECTRAKIT_TABLE";
