use super::{OracleError, Result};

/// Largest vertex count a [`LabelledGraph`] can hold.
pub const MAX_VERTICES: usize = 32;

/// Simple graph on the vertex set `0..n`, one adjacency bitmask per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledGraph {
    n: usize,
    adj: Vec<u32>,
}

/// Bitmask with the lowest `n` bits set.
pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl LabelledGraph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        LabelledGraph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 0..n {
            g.adj[v] = full_mask(n) & !(1 << v);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(OracleError::TooManyVertices(n));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(OracleError::BadEdge(u, v));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Graph whose edges are the set bits of `mask`, pairs ordered
    /// `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let mut g = Self::empty(n);
        let mut bit = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if mask >> bit & 1 == 1 {
                    g.add_edge(u, v);
                }
                bit += 1;
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> u32 {
        full_mask(self.n)
    }

    pub fn neighbours(&self, v: usize) -> u32 {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in bits(self.adj[u]) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|a| a.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Whether `set` induces a complete subgraph.
    pub fn is_clique(&self, set: u32) -> bool {
        bits(set).all(|v| set & !(1 << v) & !self.adj[v] == 0)
    }

    /// Vertices reachable from `start` inside `within`.
    pub fn reach(&self, start: usize, within: u32) -> u32 {
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.adj[v];
            }
            next &= within & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Connected components of the subgraph induced by `within`.
    pub fn components(&self, within: u32) -> Vec<u32> {
        let mut rest = within;
        let mut out = Vec::new();
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let c = self.reach(v, within);
            out.push(c);
            rest &= !c;
        }
        out
    }

    /// Connected and nonempty.
    pub fn is_connected_within(&self, within: u32) -> bool {
        within != 0 && self.reach(within.trailing_zeros() as usize, within) == within
    }
}

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// All subsets of `set` with exactly `size` elements, in increasing numeric order.
pub fn subsets_of_size(set: u32, size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut sub = set;
    loop {
        if sub.count_ones() as usize == size {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & set;
    }
    out.reverse();
    out
}

/// Perfect elimination order by repeated removal of the lowest simplicial vertex.
pub fn perfect_elimination_order(g: &LabelledGraph) -> Option<Vec<usize>> {
    let mut rest = g.vertices();
    let mut order = Vec::with_capacity(g.n());
    while rest != 0 {
        let v = bits(rest).find(|&v| g.is_clique(g.neighbours(v) & rest))?;
        order.push(v);
        rest &= !(1 << v);
    }
    Some(order)
}

pub fn is_chordal(g: &LabelledGraph) -> bool {
    perfect_elimination_order(g).is_some()
}

/// Largest clique size minus one, read off a perfect elimination order.
pub fn treewidth_chordal(g: &LabelledGraph) -> Result<usize> {
    let order = perfect_elimination_order(g).ok_or(OracleError::NotChordal)?;
    let mut rest = g.vertices();
    let mut width = 0;
    for v in order {
        width = width.max((g.neighbours(v) & rest).count_ones() as usize);
        rest &= !(1 << v);
    }
    Ok(width)
}

/// `n >= k` and no set of fewer than `k` vertices disconnects `g`.
pub fn is_k_connected(g: &LabelledGraph, k: usize) -> bool {
    is_k_connected_within(g, g.vertices(), k)
}

/// [`is_k_connected`] for the subgraph induced by `within`.
pub fn is_k_connected_within(g: &LabelledGraph, within: u32, k: usize) -> bool {
    if (within.count_ones() as usize) < k {
        return false;
    }
    (0..k).all(|s| {
        subsets_of_size(within, s)
            .into_iter()
            .all(|sep| g.is_connected_within(within & !sep))
    })
}

/// Largest `k` with [`is_k_connected`]`(g, k)`.
pub fn connectivity(g: &LabelledGraph) -> usize {
    let all = g.vertices();
    for s in 0..g.n() {
        if subsets_of_size(all, s)
            .into_iter()
            .any(|sep| !g.is_connected_within(all & !sep))
        {
            return s;
        }
    }
    g.n()
}

/// Number of `i`-subsets inducing a complete subgraph.
pub fn count_cliques(g: &LabelledGraph, i: usize) -> u64 {
    fn extend(g: &LabelledGraph, candidates: u32, need: usize) -> u64 {
        if need == 0 {
            return 1;
        }
        let mut total = 0;
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += extend(g, rest & g.neighbours(v), need - 1);
        }
        total
    }
    extend(g, g.vertices(), i)
}
