//! Chain graphs, covariance-concentration graphs and their independence
//! models: separation, Markov equivalence, structure learning, closure of
//! independence bases and reading dependencies off a graph.

pub mod closure;
pub mod dependence;
pub mod enumerate;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod io;
pub mod learn;
pub mod nodeset;
pub mod oracle;
pub mod separation;
pub mod verify;

pub use error::{CgError, Result};
pub use graph::{is_head_no_tail, Edge, EdgeKind, End, MccgViolation, MixedGraph, Triplex};
pub use nodeset::{NodeSet, MAX_NODES};
