use hgp_core::pricing::{self, BuyingRule, Price, PriceFunction, PricingInstance};
use hgp_core::rational::{self, frac, int, Rational};
use hgp_core::Caps;
use proptest::prelude::*;

/// Straight from the buying rules, one group at a time.
fn naive_revenue(inst: &PricingInstance, p: &[Price]) -> Rational {
    let mut total = int(0);
    for g in inst.groups() {
        let mult = rational::from_biguint(&g.multiplicity);
        match inst.rule() {
            BuyingRule::Udp => {
                let mut cheapest: Option<Rational> = None;
                for &i in &g.bundle {
                    if let Price::Finite(v) = &p[i] {
                        if *v <= g.budget && cheapest.as_ref().is_none_or(|c| v < c) {
                            cheapest = Some(v.clone());
                        }
                    }
                }
                if let Some(v) = cheapest {
                    total += v * mult;
                }
            }
            BuyingRule::Smp => {
                let mut sum = Some(int(0));
                for &i in &g.bundle {
                    sum = match (&p[i], sum) {
                        (Price::Finite(v), Some(s)) => Some(s + v),
                        _ => None,
                    };
                }
                if let Some(s) = sum.filter(|s| *s <= g.budget) {
                    total += s * mult;
                }
            }
        }
    }
    total
}

fn grid_vectors(items: usize, grid: &[Price]) -> Vec<Vec<Price>> {
    let mut out = vec![vec![]];
    for _ in 0..items {
        out = out
            .into_iter()
            .flat_map(|v| {
                grid.iter().map(move |p| {
                    let mut w = v.clone();
                    w.push(p.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn budget_grid(inst: &PricingInstance) -> Vec<Price> {
    let mut values: Vec<Rational> = inst.groups().iter().map(|g| g.budget.clone()).collect();
    values.sort();
    values.dedup();
    let mut grid: Vec<Price> = values.into_iter().map(Price::Finite).collect();
    grid.push(Price::Infinite);
    grid
}

fn rule_of(flag: bool) -> BuyingRule {
    if flag {
        BuyingRule::Smp
    } else {
        BuyingRule::Udp
    }
}

fn price_strategy() -> impl Strategy<Value = Price> {
    prop_oneof![
        1 => Just(Price::Infinite),
        6 => (0i64..10, 1i64..5).prop_map(|(a, b)| Price::Finite(frac(a, b))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn revenue_matches_naive(
        items in 1usize..7, groups in 0usize..9, smp in any::<bool>(), seed in any::<u64>(),
        p in proptest::collection::vec(price_strategy(), 6),
    ) {
        let inst = PricingInstance::random(items, groups, 3, 5, rule_of(smp), seed).unwrap();
        let mut prices = PriceFunction { prices: p[..items].to_vec() };
        if smp && prices.prices.contains(&Price::Infinite) {
            prop_assert!(pricing::revenue(&inst, &prices).is_err());
            prices.prices.retain(|x| *x != Price::Infinite);
            prices.prices.resize(items, Price::zero());
        }
        let report = pricing::evaluate_revenue(&inst, &prices).unwrap();
        prop_assert_eq!(&report.revenue, &naive_revenue(&inst, &prices.prices));
        let sum = report.groups.iter().fold(int(0), |acc, s| acc + &s.contribution);
        prop_assert_eq!(sum, report.revenue);
    }

    #[test]
    fn udp_oracle_matches_budget_grid(items in 1usize..4, groups in 1usize..6, seed in any::<u64>()) {
        let inst = PricingInstance::random(items, groups, 3, 4, BuyingRule::Udp, seed).unwrap();
        let want = grid_vectors(items, &budget_grid(&inst))
            .iter()
            .map(|v| naive_revenue(&inst, v))
            .max()
            .unwrap();
        let got = pricing::opt_udp_bruteforce(&inst, &Caps::default()).unwrap();
        prop_assert_eq!(&got.revenue, &want);
        prop_assert_eq!(naive_revenue(&inst, &got.prices.prices), want);
    }

    #[test]
    fn smp_oracle_dominates_grids(items in 1usize..4, groups in 1usize..6, seed in any::<u64>()) {
        let inst = PricingInstance::random(items, groups, 3, 4, BuyingRule::Smp, seed).unwrap();
        let got = pricing::opt_smp_bruteforce(&inst, &Caps::default()).unwrap();
        prop_assert_eq!(naive_revenue(&inst, &got.prices.prices), got.revenue.clone());
        let grid: Vec<Price> = (0..=36).map(|a| Price::Finite(frac(a, 4))).collect();
        for v in grid_vectors(items, &grid) {
            prop_assert!(naive_revenue(&inst, &v) <= got.revenue);
        }
    }

    #[test]
    fn algorithms_never_beat_the_oracle(items in 1usize..6, groups in 1usize..7, smp in any::<bool>(), seed in any::<u64>()) {
        let caps = Caps::default();
        let inst = PricingInstance::random(items, groups, 3, 4, rule_of(smp), seed).unwrap();
        let opt = pricing::opt_bruteforce(&inst, &caps).unwrap().revenue;
        let alpha = int(2);
        let quarter = &opt / int(4);
        let uniform = pricing::uniform_price_approx(&inst).unwrap();
        let geometric = pricing::geometric_enum_approx(&inst, &alpha, &caps).unwrap();
        prop_assert!(uniform.revenue <= opt);
        prop_assert!(geometric.revenue <= opt);
        prop_assert!(geometric.revenue >= quarter);
        prop_assert_eq!(naive_revenue(&inst, &geometric.prices.prices), geometric.revenue);
        for delta in [int(0), frac(1, 2), int(1)] {
            let s = pricing::approximation_scheme(&inst, &delta, &alpha, &caps).unwrap();
            let q = rational::ceil_root_power(items as u64, &delta).unwrap();
            prop_assert!(s.priced.revenue <= opt);
            prop_assert!(s.priced.revenue >= &quarter / Rational::from_integer(q.into()));
        }
    }

    #[test]
    fn extension_and_decomposition(items in 1usize..6, groups in 1usize..7, smp in any::<bool>(), seed in any::<u64>(), q in 1usize..6) {
        let caps = Caps::default();
        let inst = PricingInstance::random(items, groups, 3, 4, rule_of(smp), seed).unwrap();
        let q = q.min(items);
        let opt = pricing::opt_bruteforce(&inst, &caps).unwrap().revenue;
        let blocks = pricing::partition_items(&inst, q).unwrap();
        let mut covered: Vec<usize> = blocks.iter().flat_map(|b| b.items.clone()).collect();
        covered.sort();
        prop_assert_eq!(covered, (0..items).collect::<Vec<_>>());
        let mut total = int(0);
        for b in &blocks {
            let sub = pricing::opt_bruteforce(&b.instance, &caps).unwrap();
            let full = pricing::extend_prices(&inst, &b.items, &sub.prices).unwrap();
            prop_assert!(naive_revenue(&inst, &full.prices) >= sub.revenue);
            total += sub.revenue;
        }
        prop_assert!(total >= opt);
    }
}

fn instance(json: &str) -> PricingInstance {
    serde_json::from_str(json).unwrap()
}

#[test]
fn single_item_optimum_is_best_threshold() {
    // one item: the best price is some budget b, earning b times the consumers with budget >= b
    for seed in 0..40 {
        for rule in [BuyingRule::Udp, BuyingRule::Smp] {
            let inst =
                PricingInstance::random(1, 1 + (seed % 6) as usize, 1, 4, rule, seed).unwrap();
            let want = inst
                .groups()
                .iter()
                .map(|g| {
                    let buyers = inst
                        .groups()
                        .iter()
                        .filter(|h| h.budget >= g.budget)
                        .fold(int(0), |acc, h| {
                            acc + rational::from_biguint(&h.multiplicity)
                        });
                    &g.budget * buyers
                })
                .max()
                .unwrap();
            assert_eq!(
                pricing::opt_bruteforce(&inst, &Caps::default())
                    .unwrap()
                    .revenue,
                want
            );
        }
    }
}

#[test]
fn smp_optimum_can_sit_off_the_budget_grid() {
    // bundles {0,1} budget 3, {0} budget 1, {1} budget 2: best is p = (1, 2), revenue 6
    let inst = instance(
        r#"{"items":2,"rule":"smp","groups":[
            {"bundle":[0,1],"budget":"3","multiplicity":"1"},
            {"bundle":[0],"budget":"1","multiplicity":"1"},
            {"bundle":[1],"budget":"2","multiplicity":"1"}]}"#,
    );
    let got = pricing::opt_bruteforce(&inst, &Caps::default()).unwrap();
    assert_eq!(got.revenue, int(6));
    assert_eq!(rational::format(&got.revenue), "6");
}

#[test]
fn oracle_refuses_large_instances() {
    let inst = PricingInstance::random(9, 4, 2, 2, BuyingRule::Udp, 3).unwrap();
    assert!(pricing::opt_bruteforce(&inst, &Caps::default())
        .unwrap_err()
        .is_refusal());
}
