use proptest::prelude::*;

use chordal_tw::oracle::{
    bits, class_graphs, count_cliques, cut_order_invariant, decompose, enumerate_count,
    enumerate_count_capped, is_chordal, is_k_connected, subsets_of_size, treewidth_chordal,
    validate_decomposition, LabelledGraph, OracleError,
};

fn graph(n: usize, edges: &[(usize, usize)]) -> LabelledGraph {
    LabelledGraph::from_edges(n, edges).unwrap()
}

fn k4_minus_edge() -> LabelledGraph {
    let mut g = LabelledGraph::complete(4);
    g.remove_edge(0, 1);
    g
}

#[test]
fn chordality() {
    assert!(!is_chordal(&LabelledGraph::cycle(4)));
    for n in 0..=7 {
        assert!(is_chordal(&LabelledGraph::complete(n)));
    }
    let mut c4 = LabelledGraph::cycle(4);
    c4.add_edge(0, 2);
    assert!(is_chordal(&c4));
    assert!(!is_chordal(&LabelledGraph::cycle(6)));
}

#[test]
fn treewidth() {
    let tree = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
    assert_eq!(treewidth_chordal(&tree).unwrap(), 1);
    assert_eq!(treewidth_chordal(&LabelledGraph::complete(4)).unwrap(), 3);
    assert_eq!(treewidth_chordal(&k4_minus_edge()).unwrap(), 2);
    assert_eq!(
        treewidth_chordal(&LabelledGraph::cycle(4)),
        Err(OracleError::NotChordal)
    );
}

#[test]
fn connectivity_convention() {
    assert!(!is_k_connected(&LabelledGraph::path(3), 2));
    assert!(is_k_connected(&LabelledGraph::complete(2), 2));
    assert!(!is_k_connected(&LabelledGraph::complete(1), 2));
    assert!(is_k_connected(&LabelledGraph::empty(3), 0));
    assert!(!is_k_connected(&LabelledGraph::empty(2), 1));
    assert!(is_k_connected(&LabelledGraph::cycle(5), 2));
    assert!(!is_k_connected(&LabelledGraph::cycle(5), 3));
}

#[test]
fn cliques() {
    assert_eq!(count_cliques(&LabelledGraph::complete(4), 3), 4);
    assert_eq!(count_cliques(&k4_minus_edge(), 3), 2);
    for n in 1..6 {
        assert_eq!(count_cliques(&LabelledGraph::path(n), 1), n as u64);
    }
}

#[test]
fn enumeration_examples() {
    assert_eq!(enumerate_count(1, 1, 4).unwrap(), 16);
    assert_eq!(enumerate_count(2, 0, 3).unwrap(), 8);
    assert_eq!(enumerate_count(2, 2, 4).unwrap(), 6);
    assert!(matches!(
        enumerate_count(1, 1, 9),
        Err(OracleError::OverCap { .. })
    ));
    assert!(enumerate_count_capped(1, 1, 11, 12).is_err());
}

#[test]
fn diagonal_matches_k_trees() {
    for t in 1..=3u32 {
        for n in t..=7 {
            let want = if n <= t + 1 {
                1
            } else {
                let c = (0..t).fold(1u64, |a, i| a * (n - i) as u64 / (i + 1) as u64);
                c * ((t * (n - t) + 1) as u64).pow(n - t - 2)
            };
            assert_eq!(
                enumerate_count(t as usize, t as usize, n as usize).unwrap(),
                want,
                "t={t} n={n}"
            );
        }
    }
}

#[test]
fn decompose_examples() {
    for t in 1..=4 {
        let k = LabelledGraph::complete(t + 1);
        for cut in 0..=t {
            assert_eq!(decompose(&k, cut).unwrap(), vec![(1u32 << (t + 1)) - 1]);
        }
    }
    assert_eq!(
        decompose(&LabelledGraph::path(3), 1).unwrap(),
        vec![0b011, 0b110]
    );
    assert_eq!(
        decompose(&LabelledGraph::cycle(4), 1),
        Err(OracleError::NotChordal)
    );
    assert_eq!(
        decompose(&LabelledGraph::path(3), 2),
        Err(OracleError::NotKConnected(2))
    );
}

#[test]
fn validation_examples() {
    for k in 0..=3 {
        assert!(validate_decomposition(&LabelledGraph::complete(4), k)
            .unwrap()
            .is_valid());
    }
    assert!(validate_decomposition(&LabelledGraph::cycle(4), 1).is_err());
}

/// Vertex sets of the biconnected components of a connected graph, by Tarjan's
/// lowpoint algorithm.
fn blocks(g: &LabelledGraph) -> Vec<u32> {
    struct State<'a> {
        g: &'a LabelledGraph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<u32>,
    }
    fn dfs(s: &mut State, v: usize, parent: Option<usize>) {
        s.time += 1;
        s.disc[v] = s.time;
        s.low[v] = s.time;
        for w in bits(s.g.neighbours(v)) {
            if s.disc[w] == 0 {
                s.stack.push((v, w));
                dfs(s, w, Some(v));
                s.low[v] = s.low[v].min(s.low[w]);
                if s.low[w] >= s.disc[v] {
                    let mut block = 0u32;
                    while let Some((a, b)) = s.stack.pop() {
                        block |= 1 << a | 1 << b;
                        if (a, b) == (v, w) {
                            break;
                        }
                    }
                    s.out.push(block);
                }
            } else if Some(w) != parent && s.disc[w] < s.disc[v] {
                s.stack.push((v, w));
                s.low[v] = s.low[v].min(s.disc[w]);
            }
        }
    }
    let n = g.n();
    let mut s = State {
        g,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    dfs(&mut s, 0, None);
    s.out.sort_unstable();
    s.out
}

#[test]
fn one_cuts_are_blocks() {
    for n in 2..=6 {
        for g in class_graphs(n, 1, n).unwrap() {
            assert_eq!(decompose(&g, 1).unwrap(), blocks(&g), "{:?}", g.edges());
        }
    }
}

fn cliques_within(g: &LabelledGraph, set: u32, j: usize) -> usize {
    subsets_of_size(set, j)
        .into_iter()
        .filter(|&s| g.is_clique(s))
        .count()
}

#[test]
fn clique_bookkeeping() {
    // j-cliques of g = sum over pieces minus the copies made at shared k-cliques
    for n in 1..=6 {
        for k in 0..=3usize {
            for g in class_graphs(n, k, n).unwrap() {
                let pieces = decompose(&g, k).unwrap();
                let shared: Vec<(u32, usize)> = subsets_of_size(g.vertices(), k)
                    .into_iter()
                    .map(|s| (s, pieces.iter().filter(|&&p| p & s == s).count()))
                    .filter(|&(_, m)| m >= 2)
                    .collect();
                for j in 1..=n {
                    let sum: usize = pieces.iter().map(|&p| cliques_within(&g, p, j)).sum();
                    let copies: usize = shared
                        .iter()
                        .map(|&(s, m)| (m - 1) * cliques_within(&g, s, j))
                        .sum();
                    assert_eq!(
                        sum - copies,
                        count_cliques(&g, j) as usize,
                        "{:?} k={k} j={j}",
                        g.edges()
                    );
                }
            }
        }
    }
}

#[test]
fn exhaustive_validation_small() {
    for n in 1..=5 {
        for k in 0..=3 {
            for g in class_graphs(n, k, n).unwrap() {
                assert!(validate_decomposition(&g, k).unwrap().is_valid());
                assert!(cut_order_invariant(&g, k).unwrap());
            }
        }
    }
}

/// Chordal iff no vertex subset of size >= 4 induces a cycle.
fn has_induced_long_cycle(g: &LabelledGraph) -> bool {
    (4..=g.n()).any(|size| {
        subsets_of_size(g.vertices(), size).into_iter().any(|s| {
            bits(s).all(|v| (g.neighbours(v) & s).count_ones() == 2) && g.is_connected_within(s)
        })
    })
}

fn largest_clique(g: &LabelledGraph) -> usize {
    (1..=g.n())
        .rev()
        .find(|&j| count_cliques(g, j) > 0)
        .unwrap_or(0)
}

prop_compose! {
    fn arb_graph()(n in 1usize..=7)(
        n in Just(n),
        mask in 0u64..(1u64 << (n * (n - 1) / 2)),
    ) -> LabelledGraph {
        LabelledGraph::from_edge_mask(n, mask)
    }
}

proptest! {
    #[test]
    fn chordal_iff_no_induced_cycle(g in arb_graph()) {
        prop_assert_eq!(is_chordal(&g), !has_induced_long_cycle(&g));
    }

    #[test]
    fn treewidth_is_clique_number_minus_one(g in arb_graph()) {
        if is_chordal(&g) {
            prop_assert_eq!(treewidth_chordal(&g).unwrap() + 1, largest_clique(&g));
        }
    }

    #[test]
    fn connectivity_by_definition(g in arb_graph(), k in 0usize..4) {
        let brute = g.n() >= k
            && (0..k).all(|s| {
                subsets_of_size(g.vertices(), s)
                    .into_iter()
                    .all(|sep| g.components(g.vertices() & !sep).len() == 1)
            });
        prop_assert_eq!(is_k_connected(&g, k), brute);
    }

    #[test]
    fn relabelling_preserves_class(g in arb_graph(), shift in 0usize..7) {
        let n = g.n();
        let edges: Vec<_> = g.edges().into_iter().map(|(u, v)| ((u + shift) % n, (v + shift) % n)).collect();
        let h = LabelledGraph::from_edges(n, &edges).unwrap();
        prop_assert_eq!(is_chordal(&g), is_chordal(&h));
        for j in 1..=n {
            prop_assert_eq!(count_cliques(&g, j), count_cliques(&h, j));
        }
    }
}
