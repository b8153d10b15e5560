//! Experiment harness around the `coexist-ia` library: JSON scenario
//! configuration, deterministic seed derivation, multithreaded Monte-Carlo
//! drivers and CSV/JSON result files.

pub mod config;
pub mod drivers;
pub mod output;
pub mod seed;

use std::fmt;

/// Harness-level failure classes, mapped onto process exit codes by the CLI:
/// configuration 2, infeasibility 3, numeric 4.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Infeasible(String),
    Numeric(String),
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "configuration error: {msg}"),
            RunError::Infeasible(msg) => write!(f, "infeasible scenario: {msg}"),
            RunError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl RunError {
    /// Exit code contract of the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Infeasible(_) => 3,
            RunError::Numeric(_) => 4,
        }
    }
}

impl From<coexist_ia::solver::SolverError> for RunError {
    fn from(e: coexist_ia::solver::SolverError) -> Self {
        use coexist_ia::solver::SolverError as S;
        match e {
            S::Infeasible { .. } => RunError::Infeasible(e.to_string()),
            S::Numeric { .. } => RunError::Numeric(e.to_string()),
            S::TooManyUsers { .. } | S::Topology { .. } | S::Scenario(_) | S::Signal(_) => {
                RunError::Config(e.to_string())
            }
        }
    }
}

impl From<coexist_ia::detect::DetectError> for RunError {
    fn from(e: coexist_ia::detect::DetectError) -> Self {
        use coexist_ia::detect::DetectError as D;
        match e {
            D::Solver(inner) => RunError::from(inner),
            D::NonPositiveWhitener { .. } => RunError::Numeric(e.to_string()),
            D::InsufficientSamples { .. } | D::EmptySample | D::InvalidConfig(_) => {
                RunError::Config(e.to_string())
            }
        }
    }
}
