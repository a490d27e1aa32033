//! Brute-force ground truth on small labelled graphs: chordality,
//! tree-width, connectivity, clique counts, exhaustive class counts and the
//! separator decomposition.

mod decompose;
mod enumerate;
mod graph;

use thiserror::Error;

pub use decompose::{
    cut_order_invariant, decompose, decompose_with, k_separators, minimal_separators, slices_at,
    validate_decomposition, CutOrder, SliceDecomposition, Verdict,
};
pub use enumerate::{
    census, class_graphs, clique_statistics, enumerate_count, enumerate_count_capped, Census,
    CliqueStatistics, DEFAULT_CAP, HARD_LIMIT,
};
pub use graph::{
    bits, connectivity, count_cliques, full_mask, is_chordal, is_k_connected,
    is_k_connected_within, perfect_elimination_order, subsets_of_size, treewidth_chordal,
    LabelledGraph, MAX_VERTICES,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph is not {0}-connected")]
    NotKConnected(usize),
    #[error("n = {n} exceeds the oracle cap {cap}")]
    OverCap { n: usize, cap: usize },
    #[error("{0} vertices is more than a graph can hold")]
    TooManyVertices(usize),
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("vertex set {set:#b} is not a separator")]
    NotASeparator { set: u32 },
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;
