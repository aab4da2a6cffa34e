use hgp_core::csp::CspInstance;
use hgp_core::disperser::{self, OrderMode};
use hgp_core::fglss::{self, CompleteSupplier, Exclusivity};
use hgp_core::graphs::{self, BipartiteGraph, Graph};
use hgp_core::matching;
use hgp_core::pricing::{self, BuyingRule};
use hgp_core::rational::{self, frac, int, Rational};
use hgp_core::reduction;
use hgp_core::Caps;
use proptest::prelude::*;

fn satisfied(csp: &CspInstance, mask: u64) -> usize {
    csp.clauses()
        .iter()
        .filter(|c| {
            let pattern = c
                .vars()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &v)| acc | (mask >> v & 1) << k);
            c.satisfying().contains(&pattern)
        })
        .count()
}

fn naive_maxsat(csp: &CspInstance) -> usize {
    (0u64..1 << csp.num_vars())
        .map(|m| satisfied(csp, m))
        .max()
        .unwrap()
}

fn naive_alpha(g: &Graph) -> usize {
    let n = g.vertex_count();
    (0u64..1 << n)
        .filter(|&m| {
            g.edges()
                .iter()
                .all(|&(u, v)| m >> u & 1 == 0 || m >> v & 1 == 0)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fglss_alpha_is_maxsat(vars in 1usize..7, clauses in 1usize..5, seed in any::<u64>()) {
        let caps = Caps::default();
        let csp = CspInstance::random(vars, clauses, 3, seed).unwrap();
        let f = fglss::fglss_build(&csp, &caps).unwrap();
        prop_assume!(f.graph.vertex_count() <= 20);
        prop_assert_eq!(f.graph.vertex_count(), csp.pattern_total());
        prop_assert_eq!(naive_alpha(&f.graph), naive_maxsat(&csp));
        prop_assert_eq!(csp.max_sat_bruteforce(&caps).unwrap().0, naive_maxsat(&csp));
    }

    #[test]
    fn complete_supplier_changes_nothing(vars in 2usize..6, clauses in 1usize..4, seed in any::<u64>()) {
        let caps = Caps::default();
        let csp = CspInstance::random_balanced(vars, clauses, 2, seed).unwrap();
        let f = fglss::fglss_build(&csp, &caps).unwrap();
        let r = fglss::disperser_replace(&f, &csp, &mut CompleteSupplier, Exclusivity::KeepClauseCliques).unwrap();
        prop_assert_eq!(r.graph, f.graph);
    }

    #[test]
    fn amplified_clauses_are_conjunctions(vars in 2usize..6, clauses in 1usize..4, t in 1usize..3, seed in any::<u64>()) {
        let csp = CspInstance::random(vars, clauses, 2, seed).unwrap();
        let amp = csp.gap_amplify(t, 5, seed).unwrap();
        prop_assert_eq!(amp.clauses().len(), 5);
        prop_assert_eq!(&amp, &csp.gap_amplify(t, 5, seed).unwrap());
        // a satisfying assignment of every original clause satisfies every amplified one
        for m in 0u64..1 << vars {
            if satisfied(&csp, m) == clauses {
                prop_assert_eq!(satisfied(&amp, m), 5);
            }
        }
    }

    #[test]
    fn disperser_draws_are_deterministic(n in 1usize..9, seed in any::<u64>()) {
        let d = 1 + (seed as usize % n);
        let a = disperser::random_disperser(n, d, seed).unwrap();
        let b = disperser::random_disperser(n, d, seed).unwrap();
        prop_assert_eq!(&a.graph, &b.graph);
        for u in 0..n {
            prop_assert!(a.graph.left_neighbors(u).len() <= d);
        }
    }

    #[test]
    fn budgets_times_multiplicities_are_one(l in 2usize..7, r in 2usize..7, seed in any::<u64>()) {
        let g = BipartiteGraph::random_bounded(l, r, 4, 0.5, seed);
        prop_assume!(g.edge_count() > 0);
        let out = reduction::reduce_full(&g, 4, seed, BuyingRule::Smp).unwrap();
        for grp in out.instance.groups() {
            prop_assert_eq!(&grp.budget * rational::from_biguint(&grp.multiplicity), int(1));
        }
        prop_assert!(out.instance.items() <= g.right_count());
    }

    #[test]
    fn induced_matchings_price_to_their_size(l in 2usize..7, r in 2usize..7, seed in any::<u64>(), smp in any::<bool>()) {
        let caps = Caps::default();
        let g = BipartiteGraph::random_bounded(l, r, 4, 0.5, seed);
        prop_assume!(g.edge_count() > 0);
        let rule = if smp { BuyingRule::Smp } else { BuyingRule::Udp };
        let out = reduction::reduce_full(&g, 4, seed, rule).unwrap();
        let (im, m) = matching::exact_bipartite_induced_matching(&out.graph, &caps).unwrap();
        let p = reduction::matching_to_prices(&out, &m).unwrap();
        prop_assert!(pricing::revenue(&out.instance, &p).unwrap() >= Rational::from_integer(im.into()));
    }
}

#[test]
fn verified_dispersers_satisfy_the_lemma() {
    let caps = Caps::default();
    let gamma = frac(1, 4);
    let mut checked = 0;
    for seed in 0..200u64 {
        let h = disperser::random_disperser(8, 7, seed).unwrap().graph;
        if !disperser::verify_disperser(&h, &gamma, &caps)
            .unwrap()
            .passed()
        {
            continue;
        }
        let report = disperser::check_disperser_lemma(&h, &gamma, OrderMode::All, &caps).unwrap();
        assert!(report.holds(), "{report:?}");
        let cover = disperser::disperser_double_cover(&h);
        assert!(
            graphs::is_semi_induced_matching(&cover, &report.witness_order, &report.witness)
                .unwrap()
        );
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn lemma_refuses_non_dispersers() {
    let h = BipartiteGraph::perfect_matching(8);
    let err = disperser::check_disperser_lemma(&h, &frac(1, 4), OrderMode::All, &Caps::default())
        .unwrap_err();
    assert!(!err.is_refusal());
}

#[test]
fn extraction_from_optimal_prices_is_valid() {
    let caps = Caps::default();
    let t = reduction::congestion_threshold(4).unwrap();
    for seed in 0..30u64 {
        let g = BipartiteGraph::random_bounded(4, 4, 4, 0.5, seed);
        if g.edge_count() == 0 {
            continue;
        }
        for rule in [BuyingRule::Udp, BuyingRule::Smp] {
            let out = reduction::reduce_full(&g, 4, seed, rule).unwrap();
            let opt = pricing::opt_bruteforce(&out.instance, &caps).unwrap();
            let ex = reduction::extract_semi_induced_matching(&out, &opt.prices).unwrap();
            assert!(graphs::is_semi_induced_matching(&out.graph, &ex.order, &ex.matching).unwrap());
            assert!(ex.max_removed() < t);
            assert_eq!(ex.revenue, opt.revenue);
            assert!(ex.tight_revenue <= ex.revenue);
        }
    }
}
