//! Randomized (d, γ)-dispersers: construction as a union of random perfect
//! matchings, exhaustive verification, and the two structural properties
//! every disperser must have (balanced independent sets stay small, and the
//! double cover has no large semi-induced matching).

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::caps::{ensure, Caps};
use crate::error::{Error, Result};
use crate::fglss::DisperserSupplier;
use crate::graphs::{
    bipartite_double_cover, max_semi_induced_matching_any_order, max_semi_induced_matching_fixed,
    BipartiteGraph, Matching, VertexOrder,
};
use crate::rational::{self, Rational};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

fn check_gamma(gamma: &Rational) -> Result<()> {
    if *gamma <= rational::int(0) || *gamma >= rational::int(1) {
        return Err(Error::input(format!("gamma {gamma} is not in (0, 1)")));
    }
    Ok(())
}

/// `ceil((3/γ) · log(1/γ))`.
pub fn suggest_degree(gamma: &Rational, base: LogBase) -> Result<usize> {
    check_gamma(gamma)?;
    let g = rational::to_f64(gamma);
    let log = match base {
        LogBase::Natural => (1.0 / g).ln(),
        LogBase::Two => (1.0 / g).log2(),
    };
    Ok(((3.0 / g) * log).ceil() as usize)
}

/// `ceil(γ n)`: the subset size at which the disperser property must bite.
pub fn threshold(n: usize, gamma: &Rational) -> usize {
    rational::ceil_times(gamma, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disperser {
    pub graph: BipartiteGraph,
    /// Number of matchings drawn; every degree is at most this.
    pub target_degree: usize,
}

/// Union of `d` independent uniform random perfect matchings on `n + n`
/// vertices, parallel edges merged.
pub fn random_disperser(n: usize, d: usize, seed: u64) -> Result<Disperser> {
    if d > n {
        return Err(Error::input(format!("degree {d} exceeds side size {n}")));
    }
    let mut rng = seed::rng(seed);
    let mut edges = Vec::with_capacity(n * d);
    let mut targets: Vec<usize> = (0..n).collect();
    for _ in 0..d {
        targets.shuffle(&mut rng);
        edges.extend(targets.iter().enumerate().map(|(u, &w)| (u, w)));
    }
    Ok(Disperser {
        graph: BipartiteGraph::with_merged_edges(n, n, edges)?,
        target_degree: d,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Disperser,
    /// `x` (left) and `y` (right) both have `ceil(γ n)` vertices and no edge between them.
    Violation {
        x: Vec<usize>,
        y: Vec<usize>,
    },
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Disperser)
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Checks every left subset of size `c = ceil(γ n)`: its set of right
/// non-neighbours must have fewer than `c` vertices. Larger subsets follow by
/// monotonicity. The first violation in lexicographic order of `x` is
/// returned, with `y` the `c` smallest non-neighbours.
pub fn verify_disperser(g: &BipartiteGraph, gamma: &Rational, caps: &Caps) -> Result<Verification> {
    check_gamma(gamma)?;
    let n = g.left_count();
    if g.right_count() != n {
        return Err(Error::input("a disperser needs equal sides"));
    }
    ensure(
        "disperser side",
        n as u64,
        caps.disperser_side.min(64) as u64,
    )?;
    let c = threshold(n, gamma);
    if c == 0 || c > n {
        return Ok(Verification::Disperser);
    }
    let subsets = binomial(n as u64, c as u64);
    if subsets > u128::from(caps.disperser_subsets) {
        return Err(Error::refused(
            "disperser verification subsets",
            subsets,
            caps.disperser_subsets,
        ));
    }
    let masks: Vec<u64> = (0..n)
        .map(|u| g.left_neighbors(u).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let all = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut x: Vec<usize> = (0..c).collect();
    loop {
        let covered = x.iter().fold(0u64, |m, &u| m | masks[u]);
        let free = all & !covered;
        if free.count_ones() as usize >= c {
            let y = (0..n).filter(|&w| free >> w & 1 == 1).take(c).collect();
            return Ok(Verification::Violation { x, y });
        }
        // next combination in lexicographic order
        let mut i = c;
        while i > 0 && x[i - 1] == n - c + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(Verification::Disperser);
        }
        x[i - 1] += 1;
        for j in i..c {
            x[j] = x[j - 1] + 1;
        }
    }
}

/// Which orders the semi-induced bound is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMode {
    /// Exact maximum over all orders.
    All,
    /// Maximum over `count` uniformly random orders drawn from `seed`.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub n: usize,
    pub gamma: String,
    /// max over independent sets S of min(|S ∩ O|, |S ∩ Z|).
    pub independent_min: usize,
    pub independent_bound_holds: bool,
    /// Largest semi-induced matching of the double cover over the checked orders.
    pub semi_induced: usize,
    /// `4 γ n` as an exact rational.
    pub semi_induced_bound: String,
    pub semi_induced_bound_holds: bool,
    /// `None` when every order was covered.
    pub sampled_orders: Option<usize>,
    pub witness: Matching,
    pub witness_order: VertexOrder,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.independent_bound_holds && self.semi_induced_bound_holds
    }
}

/// The double cover of `h` without same-vertex edges, with `O` = left side
/// of `h` as vertices `0..n` and `Z` = right side as `n..2n`.
pub fn disperser_double_cover(h: &BipartiteGraph) -> BipartiteGraph {
    bipartite_double_cover(&h.to_graph(), false)
}

/// Brute-force check of both disperser properties. Refuses graphs that do not
/// pass [`verify_disperser`].
pub fn check_disperser_lemma(
    h: &BipartiteGraph,
    gamma: &Rational,
    mode: OrderMode,
    caps: &Caps,
) -> Result<LemmaReport> {
    if !verify_disperser(h, gamma, caps)?.passed() {
        return Err(Error::input(
            "graph fails disperser verification; lemma check refused",
        ));
    }
    let n = h.left_count();
    ensure(
        "disperser lemma vertex count",
        (2 * n) as u64,
        caps.lemma_vertices as u64,
    )?;
    let gamma_n = gamma * Rational::from_integer(n.into());

    let masks: Vec<u64> = (0..n)
        .map(|u| h.left_neighbors(u).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let mut independent_min = 0;
    for subset in 0u64..1u64 << n {
        let size = subset.count_ones() as usize;
        if size <= independent_min {
            continue;
        }
        let covered = (0..n)
            .filter(|&u| subset >> u & 1 == 1)
            .fold(0u64, |m, u| m | masks[u]);
        let free = n - covered.count_ones() as usize;
        independent_min = independent_min.max(size.min(free));
    }

    let cover = disperser_double_cover(h);
    let (semi_induced, witness, witness_order, sampled_orders) = match mode {
        OrderMode::All => {
            let (size, m, order) = max_semi_induced_matching_any_order(&cover, caps)?;
            (size, m, order, None)
        }
        OrderMode::Sampled { count, seed } => {
            let mut best: Option<(usize, Matching, VertexOrder)> = None;
            for i in 0..count.max(1) {
                let order = VertexOrder::random(cover.vertex_count(), seed ^ i as u64);
                let (size, m) = max_semi_induced_matching_fixed(&cover, &order, caps)?;
                if best.as_ref().is_none_or(|b| size > b.0) {
                    best = Some((size, m, order));
                }
            }
            let (size, m, order) = best.expect("at least one order");
            (size, m, order, Some(count.max(1)))
        }
    };
    let bound = rational::int(4) * &gamma_n;
    Ok(LemmaReport {
        n,
        gamma: rational::format(gamma),
        independent_min,
        independent_bound_holds: Rational::from_integer(independent_min.into()) <= gamma_n,
        semi_induced,
        semi_induced_bound_holds: Rational::from_integer(semi_induced.into()) <= bound,
        semi_induced_bound: rational::format(&bound),
        sampled_orders,
        witness,
        witness_order,
    })
}

/// Supplies verified random dispersers. For each variable it draws up to
/// `max_attempts` graphs at the requested degree and moves to the next
/// degree when none verifies; degree `n` is the complete graph.
#[derive(Debug, Clone)]
pub struct VerifiedRandomSupplier {
    pub degree: usize,
    pub gamma: Rational,
    pub seed: u64,
    pub max_attempts: usize,
    pub caps: Caps,
    /// (variable, side size, degree used, graphs drawn) for each supplied disperser.
    pub log: Vec<(usize, usize, usize, usize)>,
}

impl VerifiedRandomSupplier {
    pub fn new(degree: usize, gamma: Rational, seed: u64) -> Self {
        VerifiedRandomSupplier {
            degree,
            gamma,
            seed,
            max_attempts: 32,
            caps: Caps::DESK,
            log: Vec::new(),
        }
    }
}

impl DisperserSupplier for VerifiedRandomSupplier {
    fn supply(&mut self, var: usize, n: usize) -> Result<BipartiteGraph> {
        let mut drawn = 0;
        for degree in self.degree.max(1).min(n)..n {
            for attempt in 0..self.max_attempts {
                let s = self.seed
                    ^ (var as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    ^ ((degree as u64) << 40)
                    ^ attempt as u64;
                let candidate = random_disperser(n, degree, s)?;
                drawn += 1;
                if verify_disperser(&candidate.graph, &self.gamma, &self.caps)?.passed() {
                    self.log.push((var, n, degree, drawn));
                    return Ok(candidate.graph);
                }
            }
        }
        self.log.push((var, n, n, drawn));
        Ok(BipartiteGraph::complete(n, n))
    }
}
