use std::fmt;

use super::graph::{
    bits, is_chordal, is_k_connected, is_k_connected_within, subsets_of_size, LabelledGraph,
};
use super::{OracleError, Result};

/// Which `k`-separator is cut first when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutOrder {
    /// Smallest vertex bitmask first.
    Ascending,
    /// Largest vertex bitmask first.
    Descending,
}

/// The slices obtained by cutting along one separator. Vertex sets are bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceDecomposition {
    pub separator: u32,
    /// Each slice is a component of the remainder together with the separator.
    pub slices: Vec<u32>,
}

/// Cuts the subgraph induced by `within` along `sep`.
pub fn slices_at(g: &LabelledGraph, within: u32, sep: u32) -> Result<SliceDecomposition> {
    let comps = g.components(within & !sep);
    if comps.len() < 2 {
        return Err(OracleError::NotASeparator { set: sep });
    }
    Ok(SliceDecomposition {
        separator: sep,
        slices: comps.into_iter().map(|c| c | sep).collect(),
    })
}

/// Vertex sets of size `k` inside `within` whose removal disconnects it.
pub fn k_separators(g: &LabelledGraph, within: u32, k: usize) -> Vec<u32> {
    subsets_of_size(within, k)
        .into_iter()
        .filter(|&s| g.components(within & !s).len() >= 2)
        .collect()
}

/// Separators `S` of any size such that `g - S` has two components in which
/// every vertex of `S` has a neighbour.
pub fn minimal_separators(g: &LabelledGraph) -> Vec<u32> {
    let all = g.vertices();
    let mut out = Vec::new();
    for size in 0..g.n() {
        for s in subsets_of_size(all, size) {
            let full = g
                .components(all & !s)
                .into_iter()
                .filter(|&c| bits(s).all(|v| g.neighbours(v) & c != 0))
                .count();
            if full >= 2 {
                out.push(s);
            }
        }
    }
    out
}

fn check_input(g: &LabelledGraph, k: usize) -> Result<()> {
    if !is_chordal(g) {
        return Err(OracleError::NotChordal);
    }
    if !is_k_connected(g, k) {
        return Err(OracleError::NotKConnected(k));
    }
    Ok(())
}

fn split(g: &LabelledGraph, piece: u32, k: usize, order: CutOrder, out: &mut Vec<u32>) {
    let seps = k_separators(g, piece, k);
    let pick = match order {
        CutOrder::Ascending => seps.first(),
        CutOrder::Descending => seps.last(),
    };
    match pick {
        None => out.push(piece),
        Some(&sep) => {
            let cut = slices_at(g, piece, sep).expect("k_separators only returns separators");
            for slice in cut.slices {
                split(g, slice, k, order, out);
            }
        }
    }
}

/// Vertex sets of the pieces left after cutting through every `k`-separator,
/// sorted so that results can be compared as multisets.
pub fn decompose(g: &LabelledGraph, k: usize) -> Result<Vec<u32>> {
    decompose_with(g, k, CutOrder::Ascending)
}

pub fn decompose_with(g: &LabelledGraph, k: usize, order: CutOrder) -> Result<Vec<u32>> {
    check_input(g, k)?;
    let mut out = Vec::new();
    split(g, g.vertices(), k, order, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Whether ascending and descending cut orders give the same pieces.
pub fn cut_order_invariant(g: &LabelledGraph, k: usize) -> Result<bool> {
    Ok(decompose_with(g, k, CutOrder::Ascending)? == decompose_with(g, k, CutOrder::Descending)?)
}

/// Outcome of [`validate_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid(why) => write!(f, "invalid: {why}"),
        }
    }
}

/// Checks that minimal separators are cliques, that slices along any
/// `k`-separator stay `k`-connected, and that the pieces of [`decompose`]
/// glue back to `g` along shared cliques.
pub fn validate_decomposition(g: &LabelledGraph, k: usize) -> Result<Verdict> {
    check_input(g, k)?;
    for s in minimal_separators(g) {
        if !g.is_clique(s) {
            return Ok(Verdict::Invalid(format!(
                "minimal separator {s:#b} is not a clique"
            )));
        }
    }
    let all = g.vertices();
    for s in k_separators(g, all, k) {
        for slice in slices_at(g, all, s)?.slices {
            if !is_k_connected_within(g, slice, k) {
                return Ok(Verdict::Invalid(format!(
                    "slice {slice:#b} of separator {s:#b} is not {k}-connected"
                )));
            }
        }
    }
    let pieces = decompose(g, k)?;
    if pieces.iter().fold(0, |m, p| m | p) != all {
        return Ok(Verdict::Invalid("pieces do not cover every vertex".into()));
    }
    for (u, v) in g.edges() {
        let both = 1 << u | 1 << v;
        if !pieces.iter().any(|p| p & both == both) {
            return Ok(Verdict::Invalid(format!(
                "edge ({u}, {v}) lies in no piece"
            )));
        }
    }
    for (i, &p) in pieces.iter().enumerate() {
        if !k_separators(g, p, k).is_empty() {
            return Ok(Verdict::Invalid(format!(
                "piece {p:#b} still has a {k}-separator"
            )));
        }
        for &q in &pieces[i + 1..] {
            let shared = p & q;
            if shared.count_ones() as usize > k || !g.is_clique(shared) {
                return Ok(Verdict::Invalid(format!(
                    "pieces {p:#b} and {q:#b} share {shared:#b}, not a clique of size <= {k}"
                )));
            }
        }
    }
    Ok(Verdict::Valid)
}
