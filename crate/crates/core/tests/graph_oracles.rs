use hgp_core::graphs::{self, BipartiteGraph, Graph, Matching, VertexOrder};
use hgp_core::matching;
use hgp_core::Caps;
use proptest::prelude::*;

/// Every edge subset of `g` that passes `keep`, largest size returned.
fn best_subset(edges: &[(usize, usize)], keep: impl Fn(&[(usize, usize)]) -> bool) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << edges.len() {
        let pick: Vec<_> = (0..edges.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| edges[i])
            .collect();
        if pick.len() > best && keep(&pick) {
            best = pick.len();
        }
    }
    best
}

fn is_matching(pick: &[(usize, usize)]) -> bool {
    pick.iter()
        .enumerate()
        .all(|(i, &(u, w))| pick[i + 1..].iter().all(|&(a, b)| a != u && b != w))
}

/// Left rank order; right vertices do not matter here.
fn semi_ok(g: &BipartiteGraph, rank: &[usize], pick: &[(usize, usize)]) -> bool {
    is_matching(pick)
        && pick.iter().all(|&(u, _)| {
            pick.iter()
                .all(|&(a, b)| a == u || rank[u] > rank[a] || !g.has_edge(u, b))
        })
}

fn induced_ok(g: &BipartiteGraph, pick: &[(usize, usize)]) -> bool {
    is_matching(pick)
        && pick.iter().all(|&(u, v)| {
            pick.iter()
                .all(|&(a, b)| a == u || (!g.has_edge(u, b) && !g.has_edge(a, v)))
        })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn small_bipartite() -> impl Strategy<Value = BipartiteGraph> {
    (1usize..5, 1usize..5, 0.1f64..0.8, any::<u64>())
        .prop_map(|(l, r, p, s)| BipartiteGraph::random(l, r, p, s))
        .prop_filter("at most 12 edges", |g| g.edge_count() <= 12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fixed_order_sim_matches_subset_enumeration(g in small_bipartite(), s in any::<u64>()) {
        let caps = Caps::default();
        let order = VertexOrder::random(g.vertex_count(), s);
        let rank: Vec<usize> = (0..g.left_count()).map(|u| order.rank(u)).collect();
        let (size, m) = graphs::max_semi_induced_matching_fixed(&g, &order, &caps).unwrap();
        prop_assert_eq!(size, best_subset(g.edges(), |p| semi_ok(&g, &rank, p)));
        prop_assert_eq!(m.len(), size);
        prop_assert!(graphs::is_semi_induced_matching(&g, &order, &m).unwrap());
    }

    #[test]
    fn any_order_sim_matches_all_permutations(g in small_bipartite()) {
        let caps = Caps::default();
        let mut best = 0;
        for perm in permutations(g.left_count()) {
            let mut rank = vec![0; g.left_count()];
            for (i, &u) in perm.iter().enumerate() {
                rank[u] = i;
            }
            best = best.max(best_subset(g.edges(), |p| semi_ok(&g, &rank, p)));
        }
        let (size, m, order) = graphs::max_semi_induced_matching_any_order(&g, &caps).unwrap();
        prop_assert_eq!(size, best);
        prop_assert!(graphs::is_semi_induced_matching(&g, &order, &m).unwrap());
        prop_assert_eq!(graphs::max_semi_induced_matching_all_orders(&g, &caps).unwrap().0, best);
    }

    #[test]
    fn induced_matching_matches_subset_enumeration(g in small_bipartite()) {
        let caps = Caps::default();
        let want = best_subset(g.edges(), |p| induced_ok(&g, p));
        let (brute, m) = graphs::max_induced_matching_bruteforce(&g, &caps).unwrap();
        prop_assert_eq!(brute, want);
        prop_assert!(graphs::is_induced_matching(&g, &m).unwrap());
        prop_assert_eq!(matching::exact_bipartite_induced_matching(&g, &caps).unwrap().0, want);
    }

    #[test]
    fn double_cover_edges(n in 1usize..7, p in 0.0f64..1.0, s in any::<u64>(), e1 in any::<bool>()) {
        let h = Graph::random(n, p, s);
        let b = graphs::bipartite_double_cover(&h, e1);
        prop_assert_eq!(b.left_count(), n);
        prop_assert_eq!(b.edge_count(), 2 * h.edge_count() + if e1 { n } else { 0 });
        for u in 0..n {
            for w in 0..n {
                prop_assert_eq!(b.has_edge(u, w), h.has_edge(u, w) || (e1 && u == w));
            }
        }
    }

    #[test]
    fn bbis_matches_subset_enumeration(g in small_bipartite()) {
        let caps = Caps::default();
        let (l, r) = (g.left_count(), g.right_count());
        let mut best = 0;
        for a in 0u32..1 << l {
            for b in 0u32..1 << r {
                let free = g.edges().iter().all(|&(u, w)| a >> u & 1 == 0 || b >> w & 1 == 0);
                if free {
                    best = best.max(a.count_ones().min(b.count_ones()) as usize);
                }
            }
        }
        prop_assert_eq!(graphs::balanced_bipartite_independence_bruteforce(&g, &caps).unwrap(), best);
    }
}

#[test]
fn independent_set_matches_subset_enumeration() {
    let caps = Caps::default();
    for s in 0..60 {
        let g = Graph::random(1 + (s % 9) as usize, 0.35, s);
        let n = g.vertex_count();
        let want = (0u32..1 << n)
            .filter(|&m| {
                g.edges()
                    .iter()
                    .all(|&(u, v)| m >> u & 1 == 0 || m >> v & 1 == 0)
            })
            .map(u32::count_ones)
            .max()
            .unwrap() as usize;
        let (size, set) = graphs::max_independent_set_bruteforce(&g, &caps).unwrap();
        assert_eq!(size, want);
        assert!(set.iter().all(|&u| set.iter().all(|&v| !g.has_edge(u, v))));
    }
}

#[test]
fn general_graph_im_for_cycles_and_paths() {
    let caps = Caps::default();
    // C_n has im = floor(n/3); P_n has im = floor((n+1)/3)
    for n in 3..10 {
        assert_eq!(
            graphs::max_induced_matching_bruteforce(&Graph::cycle(n), &caps)
                .unwrap()
                .0,
            n / 3
        );
        assert_eq!(
            graphs::max_induced_matching_bruteforce(&Graph::path(n), &caps)
                .unwrap()
                .0,
            (n + 1) / 3
        );
    }
}

#[test]
fn semi_induced_is_not_symmetric_in_the_order() {
    // a 2x2 path: u0-w0, u1-w0, u1-w1
    let g = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 0), (1, 1)]).unwrap();
    let caps = Caps::default();
    let m = Matching::new(vec![(0, 0), (1, 1)]);
    let first = VertexOrder::from_sequence(&[0, 1, 2, 3]).unwrap();
    let second = VertexOrder::from_sequence(&[1, 0, 2, 3]).unwrap();
    assert!(graphs::is_semi_induced_matching(&g, &first, &m).unwrap());
    assert!(!graphs::is_semi_induced_matching(&g, &second, &m).unwrap());
    assert_eq!(
        graphs::max_semi_induced_matching_fixed(&g, &second, &caps)
            .unwrap()
            .0,
        1
    );
    assert_eq!(
        graphs::max_semi_induced_matching_any_order(&g, &caps)
            .unwrap()
            .0,
        2
    );
    assert_eq!(
        graphs::max_induced_matching_bruteforce(&g, &caps)
            .unwrap()
            .0,
        1
    );
}

#[test]
fn refuses_past_caps() {
    let caps = Caps::default().with_overrides("sim_vertices=4").unwrap();
    let g = BipartiteGraph::complete(3, 3);
    let err = graphs::max_semi_induced_matching_any_order(&g, &caps).unwrap_err();
    assert!(err.is_refusal());
}
