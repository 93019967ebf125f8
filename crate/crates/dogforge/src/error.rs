use std::fmt;

use dogforge_core::Error as CoreError;
use serde::Serialize;

/// Failure class, which fixes the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Unparseable config, bad flag values, corrupt input files.
    Usage,
    /// Inputs parse but violate an operation's preconditions.
    Precondition,
    /// A numerical invariant failed during or after computation.
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Precondition => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    /// Full report to print on stdout despite the failure.
    pub report: Option<serde_json::Value>,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Usage,
            message: message.into(),
            report: None,
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Precondition,
            message: message.into(),
            report: None,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            message: message.into(),
            report: None,
        }
    }

    /// One-line JSON record written to stderr on failure.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: ErrorKind,
            exit_code: i32,
            message: &'a str,
        }
        let r = Record {
            error: self.kind,
            exit_code: self.kind.exit_code(),
            message: &self.message,
        };
        serde_json::to_string(&r).expect("error record serializes")
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        let kind = match &e {
            OpenCurve { .. }
            | NotParallelTransported { .. }
            | NotCyclic(_)
            | StraightRun { .. }
            | TangentNotZ(_)
            | AreaDeviation(_)
            | NoConvergence(_) => ErrorKind::Numerical,
            _ => ErrorKind::Precondition,
        };
        Self {
            kind,
            message: e.to_string(),
            report: None,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
