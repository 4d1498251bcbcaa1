//! Error types shared across the solver.

use thiserror::Error;

/// Location of a cell in a 1D or 2D field, for solver abort messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellIndex {
    One(usize),
    Two(usize, usize),
}

impl std::fmt::Display for CellIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellIndex::One(i) => write!(f, "{i}"),
            CellIndex::Two(i, j) => write!(f, "({i}, {j})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A state violates positivity of density or pressure (or is not finite).
    #[error("non-physical state: {quantity} = {value:e}")]
    NonPhysical { quantity: &'static str, value: f64 },

    /// An argument is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Scheme/grid combination cannot be assembled.
    #[error("configuration error: {0}")]
    Config(String),

    /// A scheme name does not follow the accepted grammar.
    #[error(
        "malformed scheme name '{input}': {reason}; expected 'EC<m>', '<FAMILY>-<n>' or \
         'EC<m>-<FAMILY>-<n>' with m in {{2,4,6}} and families LLF-1, ENO-2, ENO-3, \
         WENOJS-3, WENOJS-5, WENOZ-3, WENOZ-5"
    )]
    SchemeName { input: String, reason: String },

    /// Problem id not present in the registry.
    #[error("unknown problem '{id}'; available problems: {available}")]
    UnknownProblem { id: String, available: String },

    /// No closed-form/exact solution is registered for the problem.
    #[error("no exact solution available for problem '{0}'")]
    NoExactSolution(String),

    /// Time integration hit a non-physical state and stopped.
    #[error("solver abort at t = {time:e}, cell {cell}{}: {source}",
            stage.map(|s| format!(", rk stage {s}")).unwrap_or_default())]
    SolverAbort {
        time: f64,
        cell: CellIndex,
        stage: Option<u8>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
