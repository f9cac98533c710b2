//! Weighted dual trees of rational curves: intersection matrices, determinants,
//! twigs and barks, contractibility, and blowup/blowdown rewriting.

mod classify;
mod matrix;
mod rewrite;
mod tree;
mod twig;

pub use classify::{classify_contractible, classify_fujita_zero, ContractibilityClass, FujitaShape};
pub use matrix::{bareiss_det, determinant, intersection_matrix, is_negative_definite};
pub use rewrite::{
    blow_down, blow_up, contract, kk_plus_t, nc_minimalize, nc_minimalize_with, BlowupKind,
    BlowupSite, NcResult, TrackedSurface,
};
pub use tree::{Tag, VertexId, WeightedTree};
pub use twig::{bark_divisor, capacity, maximal_twigs, Bark, Chain, DivisorQ};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is not in the tree")]
    InvalidSubset(VertexId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(VertexId, VertexId),
    #[error("repeated edge {0}—{1} between non-E components")]
    MultiEdge(VertexId, VertexId),
    #[error("more than one vertex tagged E")]
    DuplicateE,
    #[error("edges outside E form a cycle")]
    Cycle,
    #[error("vertices do not form a chain: {0}")]
    NotAChain(String),
    #[error("chain is not admissible: vertex {0} has weight {1} > -2")]
    NotAdmissible(VertexId, i64),
    #[error("subset is not connected")]
    Disconnected,
    #[error("vertex {0} cannot be blown down: {1}")]
    NotContractible(VertexId, String),
    #[error("invalid blowup site: {0}")]
    InvalidSite(String),
    #[error("K·(K+T) counter {counter} disagrees with recomputation {recomputed}")]
    CounterMismatch { counter: i64, recomputed: i64 },
    #[error("singular twig matrix")]
    SingularTwig,
    #[error("tree parse error: {0}")]
    Parse(String),
}
