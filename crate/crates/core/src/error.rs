use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {0} is empty")]
    EmptyEdge(usize),
    #[error("vertex {0:?} belongs to no edge")]
    UncoveredVertex(String),
    #[error("edge {edge} lists vertex {vertex:?} twice")]
    DuplicateVertexInEdge { edge: usize, vertex: String },
    #[error("vertex {0:?} declared twice")]
    DuplicateVertex(String),
    #[error("edge {0} duplicates an earlier edge")]
    DuplicateEdge(usize),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("value {value} for vertex {vertex:?} is outside [0,1]")]
    OutOfRange { vertex: String, value: f64 },
    #[error("edge {edge} sums to {sum}")]
    EdgeNotNormalized { edge: usize, sum: f64 },
    #[error("search budget of {0} nodes exceeded")]
    SearchBudgetExceeded(u64),
    #[error("party structure does not match the scenario: {0}")]
    StructureMismatch(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverDidNotConverge { iterations: usize, residual: f64 },
    #[error("row of context {context} sums to {sum}")]
    RowNotNormalized { context: usize, sum: f64 },
    #[error("contexts {0} and {1} disagree on the marginal of {2:?}")]
    MarginalMismatch(usize, usize, String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("global assignment space of size {0} is too large")]
    StateSpaceTooLarge(u128),
    #[error("operator is not a density matrix")]
    NotAState,
    #[error("operator is not an effect")]
    NotAnEffect,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("family {0} is not a projective measurement")]
    NotAPVM(usize),
    #[error("incidence structure mismatch: {0}")]
    IncidenceMismatch(String),
    #[error("epsilon {0} outside [0,1]")]
    EpsilonOutOfRange(f64),
    #[error("post-selection has zero probability")]
    ZeroPostSelectionProbability,
    #[error("pre- and post-selected states are orthogonal")]
    OrthogonalPrePost,
    #[error("projector family is not closed: {0}")]
    FamilyNotClosed(String),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("vector is not a unit vector")]
    NotUnitVector,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Coarse category used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    UnknownResource,
    Solver,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::Parse,
            Error::UnknownName(_) => ErrorKind::UnknownResource,
            Error::SolverDidNotConverge { .. }
            | Error::Lp(_)
            | Error::SearchBudgetExceeded(_)
            | Error::StateSpaceTooLarge(_) => ErrorKind::Solver,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
