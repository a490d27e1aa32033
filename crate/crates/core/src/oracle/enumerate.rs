use rayon::prelude::*;

use super::graph::{connectivity, count_cliques, perfect_elimination_order, LabelledGraph};
use super::{OracleError, Result};

/// Default largest `n` for exhaustive enumeration (`2^28` graphs).
pub const DEFAULT_CAP: usize = 8;
/// No override may go beyond this.
pub const HARD_LIMIT: usize = 10;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap.min(HARD_LIMIT) {
        return Err(OracleError::OverCap {
            n,
            cap: cap.min(HARD_LIMIT),
        });
    }
    Ok(())
}

fn edge_masks(n: usize) -> std::ops::Range<u64> {
    0..1u64 << (n * n.saturating_sub(1) / 2)
}

/// Tree-width and connectivity of a chordal graph, `None` otherwise.
fn classify(g: &LabelledGraph) -> Option<(usize, usize)> {
    let order = perfect_elimination_order(g)?;
    let mut rest = g.vertices();
    let mut width = 0;
    for v in order {
        width = width.max((g.neighbours(v) & rest).count_ones() as usize);
        rest &= !(1 << v);
    }
    Some((width, connectivity(g)))
}

/// Chordal graphs on `[n]` tallied by tree-width and vertex connectivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    /// `counts[tw][kappa]`
    pub counts: Vec<Vec<u64>>,
}

impl Census {
    /// Graphs with tree-width at most `t` that are `k`-connected.
    pub fn count(&self, t: usize, k: usize) -> u64 {
        self.counts
            .iter()
            .take(t + 1)
            .flat_map(|row| row.iter().skip(k))
            .sum()
    }
}

/// Exhaustive census over all `2^C(n,2)` labelled graphs.
pub fn census(n: usize, cap: usize) -> Result<Census> {
    check_cap(n, cap)?;
    let size = n.max(1) + 1;
    let empty = || vec![vec![0u64; size]; size];
    let counts = edge_masks(n)
        .into_par_iter()
        .fold(empty, |mut acc, mask| {
            if let Some((tw, kappa)) = classify(&LabelledGraph::from_edge_mask(n, mask)) {
                acc[tw][kappa] += 1;
            }
            acc
        })
        .reduce(empty, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        });
    Ok(Census { n, counts })
}

/// Number of chordal, `k`-connected graphs on `[n]` with tree-width at most `t`.
pub fn enumerate_count(t: usize, k: usize, n: usize) -> Result<u64> {
    enumerate_count_capped(t, k, n, DEFAULT_CAP)
}

pub fn enumerate_count_capped(t: usize, k: usize, n: usize, cap: usize) -> Result<u64> {
    Ok(census(n, cap)?.count(t, k))
}

/// Every graph on `[n]` in the class, in edge-mask order.
pub fn class_graphs(t: usize, k: usize, n: usize) -> Result<Vec<LabelledGraph>> {
    check_cap(n, DEFAULT_CAP)?;
    Ok(edge_masks(n)
        .into_par_iter()
        .map(|mask| LabelledGraph::from_edge_mask(n, mask))
        .filter(|g| matches!(classify(g), Some((tw, kappa)) if tw <= t && kappa >= k))
        .collect())
}

/// Sums of the `i`-clique count and its square over a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueStatistics {
    pub graphs: u64,
    pub sum: u64,
    pub sum_sq: u64,
}

pub fn clique_statistics(t: usize, k: usize, n: usize, i: usize) -> Result<CliqueStatistics> {
    let graphs = class_graphs(t, k, n)?;
    let mut stats = CliqueStatistics {
        graphs: graphs.len() as u64,
        sum: 0,
        sum_sq: 0,
    };
    for g in &graphs {
        let c = count_cliques(g, i);
        stats.sum += c;
        stats.sum_sq += c * c;
    }
    Ok(stats)
}
