use thiserror::Error;

use crate::graph::MixedGraph;

pub type Result<T, E = CgError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CgError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("node names must be non-empty")]
    EmptyName,

    #[error("graphs are limited to {max} nodes, got {got}")]
    TooManyNodes { max: usize, got: usize },

    #[error("self-loop on `{0}`")]
    SelfLoop(String),

    #[error("more than one edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),

    #[error("invalid edge token `{0}` (expected one of --, ->, <->)")]
    InvalidEdgeToken(String),

    #[error("expected {expected}, found {found}")]
    WrongGraphKind {
        expected: &'static str,
        found: String,
    },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph has {actual} nodes but the bound is {bound}")]
    BoundExceeded { bound: usize, actual: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// The learner finished but its output violates the target class,
    /// which only happens when the oracle is not faithful to any graph.
    #[error("learner output is not valid: {diagnostics}")]
    LearnFailure {
        graph: Box<MixedGraph>,
        diagnostics: String,
    },

    #[error("no faithful parameterization found after {attempts} attempts")]
    FaithfulnessRejected { attempts: usize },
}

impl CgError {
    /// True for errors caused by bad input rather than by an algorithm
    /// running on valid input.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            CgError::LearnFailure { .. }
                | CgError::FaithfulnessRejected { .. }
                | CgError::Numerical(_)
        )
    }
}
