//! Reduction from bounded-degree bipartite (semi-)induced matching to item
//! pricing: random left coloring, removal of congested right vertices,
//! weighted consumer groups, the matching-to-prices witness, and the
//! extraction of a semi-induced matching from a price function.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{is_induced_matching, BipartiteGraph, Matching, VertexOrder};
use crate::pricing::{evaluate_revenue, BuyingRule, Group, Price, PriceFunction, PricingInstance};
use crate::rational::{self, Rational};
use crate::seed;

/// `color[u]` in `1..=d` for every left vertex `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub color: Vec<usize>,
}

fn check_d(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::input(format!("d = {d} is below 3")));
    }
    Ok(())
}

/// Independent uniform colors in `1..=d`. Requires `Δ(g) <= d` and `d >= 3`.
pub fn color_left(g: &BipartiteGraph, d: usize, seed: u64) -> Result<Coloring> {
    check_d(d)?;
    if g.max_degree() > d {
        return Err(Error::input(format!(
            "maximum degree {} exceeds d = {d}",
            g.max_degree()
        )));
    }
    let mut rng = seed::rng(seed);
    Ok(Coloring {
        color: (0..g.left_count()).map(|_| rng.gen_range(1..=d)).collect(),
    })
}

/// `T(d) = max(2, ceil(3 ln d / ln ln d))`: a right vertex with `T(d)`
/// neighbours of one color is congested.
pub fn congestion_threshold(d: usize) -> Result<usize> {
    check_d(d)?;
    let ln = (d as f64).ln();
    Ok(((3.0 * ln / ln.ln()).ceil() as usize).max(2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtered {
    /// Congested right vertices, ascending.
    pub high: Vec<usize>,
    /// The graph without them.
    pub graph: BipartiteGraph,
    /// Original index of each surviving right vertex.
    pub right_origin: Vec<usize>,
}

pub fn congestion_filter(g: &BipartiteGraph, coloring: &Coloring, d: usize) -> Result<Filtered> {
    let t = congestion_threshold(d)?;
    if coloring.color.len() != g.left_count() {
        return Err(Error::input("coloring does not cover the left side"));
    }
    let mut high = BTreeSet::new();
    for w in 0..g.right_count() {
        let mut counts = vec![0usize; d + 1];
        for &u in g.right_neighbors(w) {
            counts[coloring.color[u]] += 1;
        }
        if counts.iter().any(|&c| c >= t) {
            high.insert(w);
        }
    }
    let (graph, right_origin) = g.remove_right(&high);
    Ok(Filtered {
        high: high.into_iter().collect(),
        graph,
        right_origin,
    })
}

/// `d^{-3i}`
pub fn group_budget(d: usize, color: usize) -> Rational {
    Rational::new(1.into(), group_multiplicity(d, color).into())
}

/// `d^{3i}`
pub fn group_multiplicity(d: usize, color: usize) -> BigUint {
    BigUint::from(d).pow(3 * color as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOutput {
    pub instance: PricingInstance,
    /// The filtered graph; item `i` is its right vertex `i`.
    pub graph: BipartiteGraph,
    /// Right vertex of the input graph behind each item.
    pub right_origin: Vec<usize>,
    /// Congested right vertices of the input graph.
    pub high: Vec<usize>,
    /// Group of each left vertex; `None` when it has no neighbour left.
    pub group_of_left: Vec<Option<usize>>,
    pub left_of_group: Vec<usize>,
    pub coloring: Coloring,
    pub d: usize,
}

/// One group per left vertex `u` of color `i` with a nonempty neighbourhood:
/// bundle `N(u)`, budget `d^{-3i}`, multiplicity `d^{3i}`.
pub fn build_pricing_instance(
    filtered: &Filtered,
    coloring: &Coloring,
    d: usize,
    rule: BuyingRule,
) -> Result<ReductionOutput> {
    check_d(d)?;
    let g = &filtered.graph;
    if coloring.color.len() != g.left_count() {
        return Err(Error::input("coloring does not cover the left side"));
    }
    if let Some(&c) = coloring.color.iter().find(|&&c| c == 0 || c > d) {
        return Err(Error::input(format!("color {c} is outside 1..={d}")));
    }
    if g.right_count() == 0 {
        return Err(Error::input(
            "no right vertex survives, so there are no items",
        ));
    }
    let mut groups = Vec::new();
    let mut group_of_left = vec![None; g.left_count()];
    let mut left_of_group = Vec::new();
    for (u, slot) in group_of_left.iter_mut().enumerate() {
        let bundle = g.left_neighbors(u).to_vec();
        if bundle.is_empty() {
            continue;
        }
        let color = coloring.color[u];
        *slot = Some(groups.len());
        left_of_group.push(u);
        groups.push(Group::new(
            bundle,
            group_budget(d, color),
            group_multiplicity(d, color),
        ));
    }
    Ok(ReductionOutput {
        instance: PricingInstance::new(g.right_count(), rule, groups)?,
        graph: g.clone(),
        right_origin: filtered.right_origin.clone(),
        high: filtered.high.clone(),
        group_of_left,
        left_of_group,
        coloring: coloring.clone(),
        d,
    })
}

/// Coloring, filtering and instance construction in one call.
pub fn reduce_full(
    g: &BipartiteGraph,
    d: usize,
    seed: u64,
    rule: BuyingRule,
) -> Result<ReductionOutput> {
    let coloring = color_left(g, d, seed)?;
    let filtered = congestion_filter(g, &coloring, d)?;
    build_pricing_instance(&filtered, &coloring, d, rule)
}

/// Prices each matched item at its left vertex's budget and every other item
/// at ∞ (UDP) or 0 (SMP). `m` must be an induced matching of the filtered graph.
pub fn matching_to_prices(out: &ReductionOutput, m: &Matching) -> Result<PriceFunction> {
    if !is_induced_matching(&out.graph, m)? {
        return Err(Error::input(
            "not an induced matching of the filtered graph",
        ));
    }
    let mut prices = vec![out.instance.rule().neutral_price(); out.instance.items()];
    for &(u, v) in &m.edges {
        prices[v] = Price::Finite(group_budget(out.d, out.coloring.color[u]));
    }
    Ok(PriceFunction { prices })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStats {
    pub color: usize,
    pub candidates: usize,
    pub accepted: usize,
    /// Largest number of other candidates dropped by a single accepted edge.
    pub max_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    /// Semi-induced matching of the filtered graph with respect to `order`.
    pub matching: Matching,
    /// Left vertices by color (ascending for UDP, descending for SMP), then
    /// by index; right vertices last.
    pub order: VertexOrder,
    /// Left vertices whose consumers pay at least `budget / (4d)` each.
    pub tight: Vec<usize>,
    /// One candidate edge per tight vertex.
    pub candidates: Matching,
    pub classes: Vec<ClassStats>,
    /// Accepted edges dropped afterwards because they conflicted with an
    /// edge of another color class.
    pub cross_class_repairs: usize,
    #[serde(with = "rational::string")]
    pub tight_revenue: Rational,
    #[serde(with = "rational::string")]
    pub revenue: Rational,
}

impl Extraction {
    pub fn max_removed(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.max_removed)
            .max()
            .unwrap_or(0)
    }
}

/// Builds a semi-induced matching from the vertices whose consumers pay a
/// `1/(4d)` share of their budget under `prices`.
///
/// Each tight vertex contributes the item it buys (UDP) or its most expensive
/// item (SMP), least index on ties. Each color class is then scanned in
/// reverse order; an accepted edge `uv` drops every remaining class edge
/// `u'v'` with `u'` adjacent to `v`. A final pass over all accepted edges in
/// reverse order drops any edge whose left vertex is adjacent to the right
/// vertex of a later edge of another class.
pub fn extract_semi_induced_matching(
    out: &ReductionOutput,
    prices: &PriceFunction,
) -> Result<Extraction> {
    let inst = &out.instance;
    let g = &out.graph;
    let d = out.d;
    let rule = inst.rule();
    let sale = evaluate_revenue(inst, prices)?;
    let four_d = Rational::from_integer((4 * d).into());

    let mut tight = Vec::new();
    let mut tight_revenue = Rational::zero();
    let mut candidate_of = vec![None; g.left_count()];
    for (gi, s) in sale.groups.iter().enumerate() {
        let group = &inst.groups()[gi];
        if !s.buys || s.per_consumer < &group.budget / &four_d {
            continue;
        }
        let u = out.left_of_group[gi];
        tight.push(u);
        tight_revenue += &s.contribution;
        let item = match rule {
            BuyingRule::Udp => s.item.expect("UDP sale names its item"),
            BuyingRule::Smp => {
                let mut best = group.bundle[0];
                for &i in &group.bundle[1..] {
                    if prices.prices[i] > prices.prices[best] {
                        best = i;
                    }
                }
                best
            }
        };
        candidate_of[u] = Some(item);
    }
    tight.sort_unstable();

    let left = g.left_count();
    let mut sequence: Vec<usize> = (0..left).collect();
    sequence.sort_by_key(|&u| {
        let c = out.coloring.color[u];
        (
            if rule == BuyingRule::Udp {
                c
            } else {
                d + 1 - c
            },
            u,
        )
    });
    sequence.extend(left..left + g.right_count());
    let order = VertexOrder::from_sequence(&sequence)?;

    let mut classes = Vec::new();
    let mut accepted = Vec::new();
    for color in 1..=d {
        // reverse order: within a class, descending index
        let mut pending: Vec<(usize, usize)> = (0..left)
            .rev()
            .filter(|&u| out.coloring.color[u] == color)
            .filter_map(|u| candidate_of[u].map(|v| (u, v)))
            .collect();
        if pending.is_empty() {
            continue;
        }
        let mut stats = ClassStats {
            color,
            candidates: pending.len(),
            accepted: 0,
            max_removed: 0,
        };
        while !pending.is_empty() {
            let (u, v) = pending.remove(0);
            let before = pending.len();
            pending.retain(|&(x, _)| !g.has_edge(x, v));
            stats.max_removed = stats.max_removed.max(before - pending.len());
            stats.accepted += 1;
            accepted.push((u, v));
        }
        classes.push(stats);
    }

    accepted.sort_by_key(|&(u, _)| std::cmp::Reverse(order.rank(u)));
    let mut kept: Vec<(usize, usize)> = Vec::new();
    let mut cross_class_repairs = 0;
    for (u, v) in accepted {
        if kept.iter().any(|&(_, w)| g.has_edge(u, w)) {
            cross_class_repairs += 1;
        } else {
            kept.push((u, v));
        }
    }
    kept.sort_unstable();
    let candidates = Matching::new(
        tight
            .iter()
            .map(|&u| (u, candidate_of[u].expect("tight vertices have candidates")))
            .collect(),
    );
    Ok(Extraction {
        matching: Matching::new(kept),
        order,
        tight,
        candidates,
        classes,
        cross_class_repairs,
        tight_revenue,
        revenue: sale.revenue,
    })
}
