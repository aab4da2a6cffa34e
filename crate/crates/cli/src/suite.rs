//! The invariant suite behind `verify all`.
//!
//! Every check draws its own instances from `stage_seed(seed, name)`, so
//! results do not depend on which checks run or in what order. Records are
//! sorted by name.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hgp_core::csp::CspInstance;
use hgp_core::disperser::{self, OrderMode, Verification};
use hgp_core::fglss::{self, Exclusivity};
use hgp_core::graphs::{self, BipartiteGraph, Graph, VertexOrder};
use hgp_core::matching;
use hgp_core::pricing::{self, BuyingRule, PricingInstance};
use hgp_core::rational::{self, frac, int, Rational};
use hgp_core::reduction;
use hgp_core::seed::stage_seed;
use hgp_core::{Caps, Result};

use crate::Scale;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass)
    }
}

/// A case returns `Ok(None)` when it passes and `Ok(Some(evidence))` when it fails.
type Case = fn(u64, &Caps) -> Result<Option<Value>>;

struct Check {
    name: &'static str,
    desk: usize,
    quick: usize,
    case: Case,
}

const CHECKS: &[Check] = &[
    Check {
        name: "csp.cover_sandwich",
        desk: 20,
        quick: 3,
        case: cover_sandwich,
    },
    Check {
        name: "csp.fglss_alpha_equals_maxsat",
        desk: 60,
        quick: 5,
        case: fglss_alpha,
    },
    Check {
        name: "csp.replacement_keeps_alpha",
        desk: 20,
        quick: 3,
        case: replacement_alpha,
    },
    Check {
        name: "disperser.lemma",
        desk: 6,
        quick: 1,
        case: disperser_lemma,
    },
    Check {
        name: "disperser.verify_matches_definition",
        desk: 60,
        quick: 5,
        case: disperser_definition,
    },
    Check {
        name: "graphs.bbis_bound",
        desk: 60,
        quick: 5,
        case: bbis_bound,
    },
    Check {
        name: "graphs.bipartite_split",
        desk: 40,
        quick: 4,
        case: bipartite_split,
    },
    Check {
        name: "graphs.containment_chain",
        desk: 40,
        quick: 4,
        case: containment_chain,
    },
    Check {
        name: "graphs.double_cover_cliques",
        desk: 2,
        quick: 2,
        case: double_cover_cliques,
    },
    Check {
        name: "matching.approx_bounds",
        desk: 60,
        quick: 5,
        case: approx_bounds,
    },
    Check {
        name: "matching.exact_equals_bruteforce",
        desk: 60,
        quick: 5,
        case: exact_matching,
    },
    Check {
        name: "pricing.decomposition_lemma",
        desk: 60,
        quick: 5,
        case: decomposition,
    },
    Check {
        name: "pricing.extension_lemma",
        desk: 60,
        quick: 5,
        case: extension,
    },
    Check {
        name: "pricing.feasibility",
        desk: 40,
        quick: 4,
        case: feasibility,
    },
    Check {
        name: "pricing.geometric_ratio",
        desk: 40,
        quick: 4,
        case: geometric_ratio,
    },
    Check {
        name: "pricing.scheme_ratio",
        desk: 40,
        quick: 4,
        case: scheme_ratio,
    },
    Check {
        name: "reduction.budget_product",
        desk: 40,
        quick: 4,
        case: budget_product,
    },
    Check {
        name: "reduction.completeness",
        desk: 40,
        quick: 4,
        case: completeness,
    },
    Check {
        name: "reduction.extraction",
        desk: 30,
        quick: 3,
        case: extraction,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

pub fn run_all(scale: Scale, seed: u64, caps: &Caps) -> Vec<CheckOutcome> {
    let mut out: Vec<CheckOutcome> = CHECKS
        .par_iter()
        .map(|check| {
            let cases = match scale {
                Scale::Desk => check.desk,
                Scale::Quick => check.quick,
            };
            run_check(check, cases, seed, caps)
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

fn run_check(check: &Check, cases: usize, seed: u64, caps: &Caps) -> CheckOutcome {
    let base = stage_seed(seed, check.name);
    for i in 0..cases {
        let case_seed = base.wrapping_add(i as u64);
        let (status, counterexample, error) = match (check.case)(case_seed, caps) {
            Ok(None) => continue,
            Ok(Some(evidence)) => (
                Status::Fail,
                Some(json!({"case_seed": case_seed, "evidence": evidence})),
                None,
            ),
            Err(e) => (
                Status::Error,
                None,
                Some(format!("case seed {case_seed}: {e}")),
            ),
        };
        return CheckOutcome {
            name: check.name.to_string(),
            status,
            cases: i + 1,
            counterexample,
            error,
        };
    }
    CheckOutcome {
        name: check.name.to_string(),
        status: Status::Pass,
        cases,
        counterexample: None,
        error: None,
    }
}

fn small(seed: u64, lo: u64, hi: u64) -> usize {
    (lo + seed % (hi - lo + 1)) as usize
}

fn fail_if(bad: bool, evidence: impl FnOnce() -> Value) -> Result<Option<Value>> {
    Ok(bad.then(evidence))
}

fn fglss_alpha(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let csp = CspInstance::random(small(seed, 2, 7), small(seed >> 8, 1, 5), 3, seed)?;
    let f = fglss::fglss_build(&csp, caps)?;
    let alpha = graphs::max_independent_set_bruteforce(&f.graph, caps)?.0;
    let best = csp.max_sat_bruteforce(caps)?.0;
    fail_if(
        alpha != best,
        || json!({"csp": csp, "alpha": alpha, "maxsat": best}),
    )
}

fn balanced_replacement(
    seed: u64,
    caps: &Caps,
    gamma: &Rational,
) -> Result<(CspInstance, fglss::Fglss, fglss::Replaced)> {
    let csp = CspInstance::random_balanced(small(seed, 3, 5), small(seed >> 8, 2, 3), 2, seed)?;
    let f = fglss::fglss_build(&csp, caps)?;
    let mut supplier = disperser::VerifiedRandomSupplier::new(2, gamma.clone(), seed);
    supplier.caps = caps.clone();
    let r = fglss::disperser_replace(&f, &csp, &mut supplier, Exclusivity::KeepClauseCliques)?;
    Ok((csp, f, r))
}

fn replacement_alpha(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let (csp, f, r) = balanced_replacement(seed, caps, &frac(1, 4))?;
    let before = graphs::max_independent_set_bruteforce(&f.graph, caps)?.0;
    let after = graphs::max_independent_set_bruteforce(&r.graph, caps)?.0;
    fail_if(
        after < before,
        || json!({"csp": csp, "before": before, "after": after}),
    )
}

fn cover_sandwich(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let gamma = frac(1, 4);
    let (csp, _, r) = balanced_replacement(seed, caps, &gamma)?;
    let alpha = graphs::max_independent_set_bruteforce(&r.graph, caps)?.0;
    let cover = graphs::bipartite_double_cover(&r.graph, true);
    let bound = Rational::from_integer(alpha.into())
        + int(4) * &gamma * Rational::from_integer(r.graph.vertex_count().into());
    for k in 0..4u64 {
        let order = VertexOrder::random(cover.vertex_count(), seed ^ (k << 32));
        let sim = graphs::max_semi_induced_matching_fixed(&cover, &order, caps)?.0;
        if sim < alpha || Rational::from_integer(sim.into()) > bound {
            return Ok(Some(json!({
                "csp": csp, "alpha": alpha, "sim": sim, "bound": rational::format(&bound),
            })));
        }
    }
    Ok(None)
}

fn disperser_lemma(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let gamma = frac(1, 4);
    let n = 10;
    let degree = small(seed >> 8, 7, 9);
    for attempt in 0..32u64 {
        let d = disperser::random_disperser(n, degree, seed ^ (attempt << 40))?;
        if disperser::verify_disperser(&d.graph, &gamma, caps)?.passed() {
            let report = disperser::check_disperser_lemma(&d.graph, &gamma, OrderMode::All, caps)?;
            return fail_if(
                !report.holds(),
                || json!({"graph": d.graph, "report": report}),
            );
        }
    }
    Ok(Some(
        json!({"degree": degree, "reason": "no verified disperser in 32 draws"}),
    ))
}

/// Direct definition: every pair of `ceil(γn)`-subsets, one per side, spans an edge.
fn is_disperser_by_pairs(g: &BipartiteGraph, c: usize) -> bool {
    let n = g.left_count();
    let subsets: Vec<u32> = (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == c)
        .collect();
    subsets.iter().all(|&x| {
        subsets.iter().all(|&y| {
            g.edges()
                .iter()
                .any(|&(u, w)| x >> u & 1 == 1 && y >> w & 1 == 1)
        })
    })
}

fn disperser_definition(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let n = small(seed, 2, 7);
    let d = small(seed >> 8, 1, n as u64);
    let gamma = [frac(1, 4), frac(1, 3), frac(1, 2)][(seed >> 16) as usize % 3].clone();
    let g = disperser::random_disperser(n, d, seed)?.graph;
    let fast = disperser::verify_disperser(&g, &gamma, caps)?;
    let c = disperser::threshold(n, &gamma);
    let slow = is_disperser_by_pairs(&g, c);
    let witness_ok = match &fast {
        Verification::Disperser => true,
        Verification::Violation { x, y } => {
            x.len() == c && y.len() == c && x.iter().all(|&u| y.iter().all(|&w| !g.has_edge(u, w)))
        }
    };
    fail_if(
        fast.passed() != slow || !witness_ok,
        || json!({"graph": g, "gamma": rational::format(&gamma), "fast": fast, "slow": slow}),
    )
}

fn containment_chain(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random(small(seed, 2, 5), small(seed >> 8, 2, 5), 0.4, seed);
    let im = graphs::max_induced_matching_bruteforce(&g, caps)?.0;
    let order = VertexOrder::random(g.vertex_count(), seed);
    let fixed = graphs::max_semi_induced_matching_fixed(&g, &order, caps)?.0;
    let all = graphs::max_semi_induced_matching_all_orders(&g, caps)?.0;
    let any = graphs::max_semi_induced_matching_any_order(&g, caps)?.0;
    fail_if(
        !(im <= fixed && fixed <= all && all == any),
        || json!({"graph": g, "im": im, "fixed": fixed, "all_orders": all, "acyclic_search": any}),
    )
}

fn bbis_bound(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random(small(seed, 2, 6), small(seed >> 8, 2, 6), 0.35, seed);
    let im = graphs::max_induced_matching_bruteforce(&g, caps)?.0;
    let bbis = graphs::balanced_bipartite_independence_bruteforce(&g, caps)?;
    fail_if(
        bbis < im / 2,
        || json!({"graph": g, "im": im, "bbis": bbis}),
    )
}

fn bipartite_split(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random(small(seed, 2, 3), small(seed >> 8, 2, 3), 0.5, seed);
    let im = graphs::max_induced_matching_bruteforce(&g, caps)?.0;
    let cover = graphs::bipartite_double_cover(&g.to_graph(), false);
    let (size, m) = graphs::max_induced_matching_bruteforce(&cover, caps)?;
    let (a, b) = graphs::split_double_cover_matching(&g, &m);
    let ok = graphs::is_induced_matching(&g, &a)?
        && graphs::is_induced_matching(&g, &b)?
        && a.len() + b.len() == size
        && size <= 2 * im;
    fail_if(!ok, || json!({"graph": g, "im": im, "cover_im": size}))
}

/// Two copies of `K_t` joined by a perfect matching.
pub fn twin_cliques(t: usize) -> Graph {
    let mut edges = Vec::new();
    for side in [0, t] {
        for i in 0..t {
            for j in i + 1..t {
                edges.push((side + i, side + j));
            }
        }
    }
    edges.extend((0..t).map(|i| (i, t + i)));
    Graph::new(2 * t, edges).expect("twin cliques are simple")
}

fn double_cover_cliques(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let t = 4 + (seed % 2) as usize;
    let h = twin_cliques(t);
    let im = graphs::max_induced_matching_bruteforce(&h, caps)?.0;
    let cover = graphs::bipartite_double_cover(&h, true);
    let cover_im = matching::exact_bipartite_induced_matching(&cover, caps)?.0;
    fail_if(
        im != 2 || cover_im < t.div_ceil(2),
        || json!({"t": t, "im": im, "cover_im": cover_im}),
    )
}

fn exact_matching(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random(small(seed, 1, 7), small(seed >> 8, 1, 7), 0.3, seed);
    let fast = matching::exact_bipartite_induced_matching(&g, caps)?;
    let slow = graphs::max_induced_matching_bruteforce(&g, caps)?.0;
    let valid = graphs::is_induced_matching(&g, &fast.1)?;
    fail_if(
        fast.0 != slow || !valid || fast.1.len() != fast.0,
        || json!({"graph": g, "exact": fast.0, "bruteforce": slow}),
    )
}

fn approx_bounds(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random(small(seed, 2, 7), small(seed >> 8, 2, 7), 0.3, seed);
    let im = graphs::max_induced_matching_bruteforce(&g, caps)?.0;
    for r in [2, 3] {
        let s = matching::approx_induced_matching_bipartite(&g, r, caps)?;
        if !graphs::is_induced_matching(&g, &s.matching)?
            || s.size() < im.div_ceil(r)
            || s.block_total() < im
        {
            return Ok(Some(
                json!({"graph": g, "r": r, "im": im, "size": s.size()}),
            ));
        }
    }
    let h = Graph::random(small(seed, 3, 9), 0.3, seed);
    let him = graphs::max_induced_matching_bruteforce(&h, caps)?.0;
    let s = matching::approx_induced_matching_general(&h, 3, caps)?;
    fail_if(
        !graphs::is_induced_matching(&h, &s.matching)? || s.block_total() < him,
        || json!({"graph": h, "im": him, "block_total": s.block_total()}),
    )
}

fn random_instance(seed: u64) -> Result<PricingInstance> {
    let rule = if seed.is_multiple_of(2) {
        BuyingRule::Udp
    } else {
        BuyingRule::Smp
    };
    PricingInstance::random(
        small(seed >> 4, 1, 5),
        small(seed >> 12, 1, 7),
        3,
        4,
        rule,
        seed,
    )
}

fn feasibility(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let inst = random_instance(seed)?;
    let opt = pricing::opt_bruteforce(&inst, caps)?;
    let results = [
        ("uniform", pricing::uniform_price_approx(&inst)?),
        (
            "geometric",
            pricing::geometric_enum_approx(&inst, &int(2), caps)?,
        ),
        (
            "scheme",
            pricing::approximation_scheme(&inst, &frac(1, 2), &int(2), caps)?.priced,
        ),
    ];
    for (name, r) in results {
        let evaluated = pricing::revenue(&inst, &r.prices)?;
        if evaluated != r.revenue || r.revenue > opt.revenue {
            return Ok(Some(
                json!({"instance": inst, "algorithm": name, "result": r, "opt": opt}),
            ));
        }
    }
    Ok(None)
}

fn geometric_ratio(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let inst = random_instance(seed)?;
    let opt = pricing::opt_bruteforce(&inst, caps)?;
    let alpha = int(2);
    let got = pricing::geometric_enum_approx(&inst, &alpha, caps)?;
    let bound = &opt.revenue * (&alpha - int(1)) / (&alpha * &alpha);
    fail_if(
        got.revenue < bound,
        || json!({"instance": inst, "got": got, "opt": opt}),
    )
}

fn scheme_ratio(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let inst = random_instance(seed)?;
    let opt = pricing::opt_bruteforce(&inst, caps)?;
    let alpha = int(2);
    for delta in [int(0), frac(1, 2), int(1)] {
        let got = pricing::approximation_scheme(&inst, &delta, &alpha, caps)?;
        let q = rational::ceil_root_power(inst.items() as u64, &delta)?;
        let bound =
            &opt.revenue * (&alpha - int(1)) / (&alpha * &alpha * Rational::from_integer(q.into()));
        let uniform = pricing::scheme_uses_uniform(&inst, &delta);
        let branch_ok = uniform == matches!(got.branch, pricing::SchemeBranch::Uniform);
        if !branch_ok || got.priced.revenue < bound {
            return Ok(Some(json!({
                "instance": inst, "delta": rational::format(&delta), "got": got, "opt": opt,
            })));
        }
    }
    Ok(None)
}

fn extension(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let inst = random_instance(seed)?;
    let q = small(seed >> 20, 1, inst.items() as u64);
    for block in pricing::partition_items(&inst, q)? {
        let sub = pricing::opt_bruteforce(&block.instance, caps)?;
        let full = pricing::extend_prices(&inst, &block.items, &sub.prices)?;
        let value = pricing::revenue(&inst, &full)?;
        if value < sub.revenue {
            return Ok(Some(
                json!({"instance": inst, "items": block.items, "sub": sub}),
            ));
        }
    }
    Ok(None)
}

fn decomposition(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let inst = random_instance(seed)?;
    let opt = pricing::opt_bruteforce(&inst, caps)?.revenue;
    let q = small(seed >> 20, 1, inst.items() as u64);
    let mut total = int(0);
    for block in pricing::partition_items(&inst, q)? {
        total += pricing::opt_bruteforce(&block.instance, caps)?.revenue;
    }
    fail_if(
        total < opt,
        || json!({"instance": inst, "q": q, "opt": rational::format(&opt), "sum": rational::format(&total)}),
    )
}

fn reduction_graph(seed: u64) -> BipartiteGraph {
    BipartiteGraph::random_bounded(small(seed, 2, 6), small(seed >> 8, 2, 6), 4, 0.4, seed)
}

fn budget_product(seed: u64, _caps: &Caps) -> Result<Option<Value>> {
    let g = reduction_graph(seed);
    if g.edge_count() == 0 {
        return Ok(None);
    }
    let out = reduction::reduce_full(&g, 4, seed, BuyingRule::Udp)?;
    let bad = out.instance.groups().iter().any(|grp| {
        &grp.budget * rational::from_biguint(&grp.multiplicity) != int(1)
            || grp.bundle.len() > out.d
    });
    fail_if(bad, || json!({"graph": g}))
}

fn completeness(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = reduction_graph(seed);
    if g.edge_count() == 0 {
        return Ok(None);
    }
    for rule in [BuyingRule::Udp, BuyingRule::Smp] {
        let out = reduction::reduce_full(&g, 4, seed, rule)?;
        let (im, m) = matching::exact_bipartite_induced_matching(&out.graph, caps)?;
        let p = reduction::matching_to_prices(&out, &m)?;
        let value = pricing::revenue(&out.instance, &p)?;
        if value < Rational::from_integer(im.into()) {
            return Ok(Some(
                json!({"graph": g, "rule": rule, "im": im, "revenue": rational::format(&value)}),
            ));
        }
    }
    Ok(None)
}

fn extraction(seed: u64, caps: &Caps) -> Result<Option<Value>> {
    let g = BipartiteGraph::random_bounded(small(seed, 2, 5), small(seed >> 8, 2, 5), 4, 0.4, seed);
    if g.edge_count() == 0 {
        return Ok(None);
    }
    let t = reduction::congestion_threshold(4)?;
    for rule in [BuyingRule::Udp, BuyingRule::Smp] {
        let out = reduction::reduce_full(&g, 4, seed, rule)?;
        let opt = pricing::opt_bruteforce(&out.instance, caps)?;
        let ex = reduction::extract_semi_induced_matching(&out, &opt.prices)?;
        let valid = graphs::is_semi_induced_matching(&out.graph, &ex.order, &ex.matching)?;
        if !valid || ex.max_removed() + 1 > t {
            return Ok(Some(json!({"graph": g, "rule": rule, "extraction": ex})));
        }
    }
    Ok(None)
}
