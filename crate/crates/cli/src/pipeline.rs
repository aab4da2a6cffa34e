//! End-to-end run: CSP, amplification, FGLSS graph, disperser replacement,
//! double cover, reduction to pricing, and pricing on the result.

use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use hgp_core::csp::CspInstance;
use hgp_core::disperser::{self, LogBase};
use hgp_core::fglss::{self, Exclusivity};
use hgp_core::graphs::{self, BipartiteGraph, Matching};
use hgp_core::matching;
use hgp_core::pricing::{self, PriceFunction};
use hgp_core::rational;
use hgp_core::reduction;
use hgp_core::seed::stage_seed;
use hgp_core::Caps;

use crate::{read_json, CliResult, Rule};

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub csp: PathBuf,
    /// Clauses joined per amplified clause.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Amplified clause count; defaults to the input clause count.
    #[arg(long)]
    pub m_out: Option<usize>,
    #[arg(long, default_value = "1/4")]
    pub gamma: String,
    /// Disperser degree; defaults to the suggested degree for `gamma`.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value = "udp")]
    pub rule: Rule,
}

/// Greedy induced matching of a bipartite graph, edges in canonical order.
pub fn greedy_induced_matching(g: &BipartiteGraph) -> Matching {
    let mut blocked_left = vec![false; g.left_count()];
    let mut blocked_right = vec![false; g.right_count()];
    let mut edges = Vec::new();
    for &(u, w) in g.edges() {
        if blocked_left[u] || blocked_right[w] {
            continue;
        }
        edges.push((u, w));
        for &x in g.right_neighbors(w) {
            blocked_left[x] = true;
        }
        for &y in g.left_neighbors(u) {
            blocked_right[y] = true;
        }
    }
    Matching::new(edges)
}

pub fn run(args: &PipelineArgs, seed: u64, caps: &Caps) -> CliResult<Value> {
    let input: CspInstance = read_json(&args.csp)?;
    let gamma = rational::parse(&args.gamma)?;
    let d = match args.d {
        Some(d) => d,
        None => disperser::suggest_degree(&gamma, LogBase::Natural)?,
    };
    let m_out = args.m_out.unwrap_or(input.clauses().len());
    let csp = input.gap_amplify(args.t, m_out, stage_seed(seed, "pipeline amplify"))?;
    let maxsat = if csp.num_vars() <= caps.maxsat_vars {
        Some(csp.max_sat_bruteforce(caps)?.0)
    } else {
        None
    };

    let f = fglss::fglss_build(&csp, caps)?;
    let mut supplier = disperser::VerifiedRandomSupplier::new(
        d,
        gamma.clone(),
        stage_seed(seed, "pipeline replace"),
    );
    supplier.caps = caps.clone();
    let replaced =
        fglss::disperser_replace(&f, &csp, &mut supplier, Exclusivity::KeepClauseCliques)?;
    let hat = &replaced.graph;
    let alpha = if hat.vertex_count() <= caps.mis_vertices {
        Some(graphs::max_independent_set_bruteforce(hat, caps)?.0)
    } else {
        None
    };

    let cover = graphs::bipartite_double_cover(hat, true);
    let degree = cover.max_degree().max(3);
    let out = reduction::reduce_full(
        &cover,
        degree,
        stage_seed(seed, "pipeline reduce"),
        args.rule.into(),
    )?;
    let g = &out.graph;

    let exact = g.left_count().min(g.right_count()) <= caps.exact_bipartite_side;
    let witness = if exact {
        matching::exact_bipartite_induced_matching(g, caps)?.1
    } else {
        greedy_induced_matching(g)
    };
    let witness_prices = reduction::matching_to_prices(&out, &witness)?;
    let witness_revenue = pricing::revenue(&out.instance, &witness_prices)?;
    let uniform = pricing::uniform_price_approx(&out.instance)?;
    let oracle = match pricing::opt_bruteforce(&out.instance, caps) {
        Ok(p) => Some(p),
        Err(e) if e.is_refusal() => None,
        Err(e) => return Err(e.into()),
    };

    let mut best: (&str, PriceFunction, rational::Rational) =
        ("matching witness", witness_prices, witness_revenue.clone());
    if uniform.revenue > best.2 {
        best = (
            "uniform price",
            uniform.prices.clone(),
            uniform.revenue.clone(),
        );
    }
    if let Some(o) = &oracle {
        if o.revenue > best.2 {
            best = ("oracle", o.prices.clone(), o.revenue.clone());
        }
    }
    let extraction = reduction::extract_semi_induced_matching(&out, &best.1)?;
    let valid = graphs::is_semi_induced_matching(g, &extraction.order, &extraction.matching)?;

    Ok(json!({
        "csp": {
            "input_clauses": input.clauses().len(),
            "amplified_clauses": csp.clauses().len(),
            "vars": csp.num_vars(),
            "max_satisfied": maxsat,
        },
        "fglss": {
            "vertices": f.graph.vertex_count(),
            "edges": f.graph.edge_count(),
        },
        "replaced": {
            "edges": hat.edge_count(),
            "disperser_degree": d,
            "gamma": rational::format(&gamma),
            "suppliers": supplier.log.iter().map(|&(var, n, degree, drawn)| json!({
                "var": var, "side": n, "degree": degree, "drawn": drawn,
            })).collect::<Vec<_>>(),
            "independence_number": alpha,
        },
        "double_cover": {
            "left": cover.left_count(),
            "right": cover.right_count(),
            "edges": cover.edge_count(),
            "max_degree": cover.max_degree(),
        },
        "reduction": {
            "d": out.d,
            "threshold": reduction::congestion_threshold(out.d)?,
            "high": out.high.len(),
            "items": out.instance.items(),
            "groups": out.instance.groups().len(),
            "consumers": out.instance.consumer_count().to_string(),
        },
        "pricing": {
            "rule": out.instance.rule(),
            "induced_matching": witness.len(),
            "induced_matching_exact": exact,
            "witness_revenue": rational::format(&witness_revenue),
            "uniform_revenue": rational::format(&uniform.revenue),
            "oracle_revenue": oracle.as_ref().map(|o| rational::format(&o.revenue)),
            "best_source": best.0,
            "best_revenue": rational::format(&best.2),
        },
        "extraction": {
            "semi_induced": extraction.matching.len(),
            "valid": valid,
            "tight": extraction.tight.len(),
            "max_removed": extraction.max_removed(),
            "cross_class_repairs": extraction.cross_class_repairs,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_is_induced() {
        for s in 0..20 {
            let g = BipartiteGraph::random(6, 7, 0.35, s);
            let m = greedy_induced_matching(&g);
            assert!(graphs::is_induced_matching(&g, &m).unwrap());
            assert_eq!(m.is_empty(), g.edge_count() == 0);
        }
    }
}
