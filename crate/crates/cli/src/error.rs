use std::fmt;

use dualfem::Error;

/// Error classes with their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Config,
    Solver,
    Oracle,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Io => 1,
            ErrorClass::Config => 2,
            ErrorClass::Solver => 3,
            ErrorClass::Oracle => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorClass::Io => "io",
            ErrorClass::Config => "config",
            ErrorClass::Solver => "solver",
            ErrorClass::Oracle => "oracle",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Config, message: message.into() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError { class: ErrorClass::Io, message: format!("{context}: {err}") }
    }

    /// Classifies a solver-library error raised while validating input.
    pub fn from_validation(context: &str, err: Error) -> Self {
        let mut e = CliError::from_solver(context, err);
        if e.class == ErrorClass::Solver {
            e.class = ErrorClass::Config;
        }
        e
    }

    /// Classifies a solver-library error raised during a run.
    pub fn from_solver(context: &str, err: Error) -> Self {
        let class = match err.root() {
            Error::InvalidArgument(_) => ErrorClass::Config,
            Error::UnsupportedBranch(_) | Error::Undefined(_) => ErrorClass::Oracle,
            _ => ErrorClass::Solver,
        };
        CliError { class, message: format!("{context}: {err}") }
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.class.label(), self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
