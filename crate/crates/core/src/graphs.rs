//! Simple graphs, bipartite graphs, (semi-)induced matching checks, double
//! covers and the exhaustive oracles used as ground truth everywhere else.
//!
//! Semi-induced matchings are defined with respect to a total order on the
//! vertices. Matching edges are ordered pairs `(u, v)`; for a bipartite graph
//! `u` is always the left endpoint. For two edges `(u, v)` and `(a, b)` with
//! `rank(u) < rank(a)` the host graph must contain neither `ua` nor `ub`.

use std::collections::{BTreeSet, HashMap};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::caps::{ensure, Caps};
use crate::error::{Error, Result};
use crate::seed;

/// Simple undirected graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(json: GraphJson) -> Result<Self> {
        Graph::new(json.n, json.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints and duplicate edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        Self::build(n, edges, false)
    }

    /// Like [`Graph::new`] but silently merges duplicate edges.
    pub fn with_merged_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph> {
        Self::build(n, edges, true)
    }

    fn build(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        merge: bool,
    ) -> Result<Graph> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u},{v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) && !merge {
                return Err(Error::input(format!("duplicate edge ({},{})", e.0, e.1)));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n, []).expect("empty graph is valid")
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is valid")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|u| (u, (u + 1) % n))).expect("cycle is valid")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|u| (u - 1, u))).expect("path is valid")
    }

    /// G(n, p) with a fixed seed.
    pub fn random(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = seed::rng(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges).expect("random graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Induced subgraph on `keep` (reindexed in the given order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::new(keep.len(), edges).expect("induced subgraph is valid")
    }

    fn masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.adj
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }
}

/// Bipartite graph with explicit sides `0..left` and `0..right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteJson", into = "BipartiteJson")]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct BipartiteJson {
    left: usize,
    right: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<BipartiteJson> for BipartiteGraph {
    type Error = Error;

    fn try_from(json: BipartiteJson) -> Result<Self> {
        BipartiteGraph::new(
            json.left,
            json.right,
            json.edges.into_iter().map(|[u, w]| (u, w)),
        )
    }
}

impl From<BipartiteGraph> for BipartiteJson {
    fn from(g: BipartiteGraph) -> Self {
        BipartiteJson {
            left: g.left,
            right: g.right,
            edges: g.edges.iter().map(|&(u, w)| [u, w]).collect(),
        }
    }
}

impl BipartiteGraph {
    pub fn new(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<BipartiteGraph> {
        Self::build(left, right, edges, false)
    }

    pub fn with_merged_edges(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<BipartiteGraph> {
        Self::build(left, right, edges, true)
    }

    fn build(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        merge: bool,
    ) -> Result<BipartiteGraph> {
        let mut set = BTreeSet::new();
        for (u, w) in edges {
            if u >= left || w >= right {
                return Err(Error::input(format!(
                    "edge ({u},{w}) is outside the sides {left}x{right}"
                )));
            }
            if !set.insert((u, w)) && !merge {
                return Err(Error::input(format!("duplicate edge ({u},{w})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut left_adj = vec![Vec::new(); left];
        let mut right_adj = vec![Vec::new(); right];
        for &(u, w) in &edges {
            left_adj[u].push(w);
            right_adj[w].push(u);
        }
        for list in &mut right_adj {
            list.sort_unstable();
        }
        Ok(BipartiteGraph {
            left,
            right,
            edges,
            left_adj,
            right_adj,
        })
    }

    pub fn empty(left: usize, right: usize) -> BipartiteGraph {
        BipartiteGraph::new(left, right, []).expect("empty graph is valid")
    }

    pub fn complete(left: usize, right: usize) -> BipartiteGraph {
        let edges = (0..left).flat_map(|u| (0..right).map(move |w| (u, w)));
        BipartiteGraph::new(left, right, edges).expect("complete bipartite graph is valid")
    }

    pub fn perfect_matching(n: usize) -> BipartiteGraph {
        BipartiteGraph::new(n, n, (0..n).map(|i| (i, i))).expect("matching is valid")
    }

    /// Each of the `left * right` pairs kept independently with probability `p`.
    pub fn random(left: usize, right: usize, p: f64, seed: u64) -> BipartiteGraph {
        let mut rng = seed::rng(seed);
        let mut edges = Vec::new();
        for u in 0..left {
            for w in 0..right {
                if rng.gen_bool(p) {
                    edges.push((u, w));
                }
            }
        }
        BipartiteGraph::new(left, right, edges).expect("random graph is valid")
    }

    /// Random graph whose degrees on both sides stay at most `max_degree`.
    /// Candidate pairs are visited in random order and kept with probability `p`.
    pub fn random_bounded(
        left: usize,
        right: usize,
        max_degree: usize,
        p: f64,
        seed: u64,
    ) -> BipartiteGraph {
        use rand::seq::SliceRandom;
        let mut rng = seed::rng(seed);
        let mut pairs: Vec<(usize, usize)> = (0..left)
            .flat_map(|u| (0..right).map(move |w| (u, w)))
            .collect();
        pairs.shuffle(&mut rng);
        let mut ldeg = vec![0; left];
        let mut rdeg = vec![0; right];
        let mut edges = Vec::new();
        for (u, w) in pairs {
            if ldeg[u] < max_degree && rdeg[w] < max_degree && rng.gen_bool(p) {
                ldeg[u] += 1;
                rdeg[w] += 1;
                edges.push((u, w));
            }
        }
        BipartiteGraph::new(left, right, edges).expect("random graph is valid")
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn vertex_count(&self) -> usize {
        self.left + self.right
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(left, right)`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn left_neighbors(&self, u: usize) -> &[usize] {
        &self.left_adj[u]
    }

    pub fn right_neighbors(&self, w: usize) -> &[usize] {
        &self.right_adj[w]
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        u < self.left && w < self.right && self.left_adj[u].binary_search(&w).is_ok()
    }

    /// Maximum degree over both sides.
    pub fn max_degree(&self) -> usize {
        self.left_adj
            .iter()
            .chain(self.right_adj.iter())
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Swaps the sides.
    pub fn transpose(&self) -> BipartiteGraph {
        BipartiteGraph::new(
            self.right,
            self.left,
            self.edges.iter().map(|&(u, w)| (w, u)),
        )
        .expect("transpose is valid")
    }

    /// Subgraph on the given left vertices (reindexed in order) and all right vertices.
    pub fn restrict_left(&self, keep: &[usize]) -> BipartiteGraph {
        let edges = keep
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| self.left_adj[u].iter().map(move |&w| (i, w)));
        BipartiteGraph::new(keep.len(), self.right, edges).expect("restriction is valid")
    }

    /// Removes the given right vertices. Returns the reindexed graph and, for each
    /// surviving right vertex, its index in `self`.
    pub fn remove_right(&self, drop: &BTreeSet<usize>) -> (BipartiteGraph, Vec<usize>) {
        let origin: Vec<usize> = (0..self.right).filter(|w| !drop.contains(w)).collect();
        let mut index = vec![usize::MAX; self.right];
        for (i, &w) in origin.iter().enumerate() {
            index[w] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(_, w)| index[w] != usize::MAX)
            .map(|&(u, w)| (u, index[w]));
        let g = BipartiteGraph::new(self.left, origin.len(), edges).expect("removal is valid");
        (g, origin)
    }

    /// The same graph with left vertex `u` as vertex `u` and right vertex `w` as `left + w`.
    pub fn to_graph(&self) -> Graph {
        Graph::new(
            self.vertex_count(),
            self.edges.iter().map(|&(u, w)| (u, self.left + w)),
        )
        .expect("bipartite graph is simple")
    }

    fn left_masks(&self) -> Vec<u64> {
        debug_assert!(self.right <= 64);
        self.left_adj
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect()
    }

    fn right_masks(&self) -> Vec<u64> {
        debug_assert!(self.left <= 64);
        self.right_adj
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &u| m | (1 << u)))
            .collect()
    }
}

/// A set of edges given as ordered vertex pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: Vec<(usize, usize)>) -> Matching {
        Matching { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A total order on vertices, stored as the rank of each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrderJson", into = "OrderJson")]
pub struct VertexOrder {
    rank: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct OrderJson {
    order: Vec<usize>,
}

impl TryFrom<OrderJson> for VertexOrder {
    type Error = Error;

    fn try_from(json: OrderJson) -> Result<Self> {
        VertexOrder::from_sequence(&json.order)
    }
}

impl From<VertexOrder> for OrderJson {
    fn from(order: VertexOrder) -> Self {
        OrderJson {
            order: order.sequence(),
        }
    }
}

impl VertexOrder {
    pub fn identity(n: usize) -> VertexOrder {
        VertexOrder {
            rank: (0..n).collect(),
        }
    }

    /// `sequence[i]` is the vertex placed at position `i`.
    pub fn from_sequence(sequence: &[usize]) -> Result<VertexOrder> {
        let n = sequence.len();
        let mut rank = vec![usize::MAX; n];
        for (position, &v) in sequence.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(Error::input("vertex order is not a permutation"));
            }
            rank[v] = position;
        }
        Ok(VertexOrder { rank })
    }

    /// `rank[v]` is the position of vertex `v`.
    pub fn from_ranks(rank: Vec<usize>) -> Result<VertexOrder> {
        let n = rank.len();
        let mut seen = vec![false; n];
        for &r in &rank {
            if r >= n || seen[r] {
                return Err(Error::input("vertex ranks are not a bijection onto 0..n"));
            }
            seen[r] = true;
        }
        Ok(VertexOrder { rank })
    }

    /// Uniformly random order.
    pub fn random(n: usize, seed: u64) -> VertexOrder {
        use rand::seq::SliceRandom;
        let mut sequence: Vec<usize> = (0..n).collect();
        sequence.shuffle(&mut seed::rng(seed));
        VertexOrder::from_sequence(&sequence).expect("shuffle is a permutation")
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn sequence(&self) -> Vec<usize> {
        let mut sequence = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            sequence[r] = v;
        }
        sequence
    }
}

/// A graph whose vertices can be addressed in one index space.
///
/// For [`Graph`] this is the identity. For [`BipartiteGraph`] left vertex `u`
/// is `u` and right vertex `w` is `left + w`.
pub trait HostGraph {
    fn unified_vertex_count(&self) -> usize;
    /// Maps a matching edge into the unified space, checking ranges.
    fn unified_edge(&self, edge: (usize, usize)) -> Result<(usize, usize)>;
    fn unified_has_edge(&self, u: usize, v: usize) -> bool;
    /// All edges in canonical order, in unified indices.
    fn unified_edges(&self) -> Vec<(usize, usize)>;
    /// Inverse of [`HostGraph::unified_edge`].
    fn native_edge(&self, edge: (usize, usize)) -> (usize, usize);
}

impl HostGraph for Graph {
    fn unified_vertex_count(&self) -> usize {
        self.n
    }

    fn unified_edge(&self, (u, v): (usize, usize)) -> Result<(usize, usize)> {
        if u >= self.n || v >= self.n {
            return Err(Error::input(format!(
                "matching edge ({u},{v}) has an endpoint outside 0..{}",
                self.n
            )));
        }
        Ok((u, v))
    }

    fn unified_has_edge(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }

    fn unified_edges(&self) -> Vec<(usize, usize)> {
        self.edges.clone()
    }

    fn native_edge(&self, edge: (usize, usize)) -> (usize, usize) {
        edge
    }
}

impl HostGraph for BipartiteGraph {
    fn unified_vertex_count(&self) -> usize {
        self.left + self.right
    }

    fn unified_edge(&self, (u, w): (usize, usize)) -> Result<(usize, usize)> {
        if u >= self.left || w >= self.right {
            return Err(Error::input(format!(
                "matching edge ({u},{w}) is outside the sides {}x{}",
                self.left, self.right
            )));
        }
        Ok((u, self.left + w))
    }

    fn unified_has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = (a.min(b), a.max(b));
        a < self.left && b >= self.left && self.has_edge(a, b - self.left)
    }

    fn unified_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(u, w)| (u, self.left + w))
            .collect()
    }

    fn native_edge(&self, (u, v): (usize, usize)) -> (usize, usize) {
        (u, v - self.left)
    }
}

fn unified_matching<G: HostGraph>(g: &G, m: &Matching) -> Result<Vec<(usize, usize)>> {
    m.edges.iter().map(|&e| g.unified_edge(e)).collect()
}

/// Edges present and endpoints pairwise distinct.
fn is_matching_in<G: HostGraph>(g: &G, edges: &[(usize, usize)]) -> bool {
    let mut seen = BTreeSet::new();
    edges
        .iter()
        .all(|&(u, v)| g.unified_has_edge(u, v) && seen.insert(u) && seen.insert(v))
}

/// True iff `m` is a matching of `g` and no edge of `g` joins endpoints of two
/// distinct matching edges.
pub fn is_induced_matching<G: HostGraph>(g: &G, m: &Matching) -> Result<bool> {
    let edges = unified_matching(g, m)?;
    if !is_matching_in(g, &edges) {
        return Ok(false);
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        for &(a, b) in &edges[i + 1..] {
            if g.unified_has_edge(u, a)
                || g.unified_has_edge(u, b)
                || g.unified_has_edge(v, a)
                || g.unified_has_edge(v, b)
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff `m` is a `order`-semi-induced matching of `g`.
pub fn is_semi_induced_matching<G: HostGraph>(
    g: &G,
    order: &VertexOrder,
    m: &Matching,
) -> Result<bool> {
    if order.len() != g.unified_vertex_count() {
        return Err(Error::input(format!(
            "vertex order has {} entries but the graph has {} vertices",
            order.len(),
            g.unified_vertex_count()
        )));
    }
    let edges = unified_matching(g, m)?;
    if !is_matching_in(g, &edges) {
        return Ok(false);
    }
    for &(u, _) in &edges {
        for &(a, b) in &edges {
            if order.rank(u) < order.rank(a)
                && (g.unified_has_edge(u, a) || g.unified_has_edge(u, b))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact independence number with the lexicographically least maximum witness.
pub fn max_independent_set_bruteforce(g: &Graph, caps: &Caps) -> Result<(usize, Vec<usize>)> {
    ensure(
        "vertex count for independent set",
        g.vertex_count() as u64,
        caps.mis_vertices.min(64) as u64,
    )?;
    let n = g.vertex_count();
    let adj = g.masks();
    let mut best = (0usize, 0u64);
    mis_search(0, n, &adj, 0, 0, 0, &mut best);
    let witness = (0..n).filter(|&v| best.1 >> v & 1 == 1).collect();
    Ok((best.0, witness))
}

fn mis_search(
    v: usize,
    n: usize,
    adj: &[u64],
    chosen: u64,
    blocked: u64,
    count: usize,
    best: &mut (usize, u64),
) {
    if v == n {
        if count > best.0 {
            *best = (count, chosen);
        }
        return;
    }
    let rest = if n == 64 { !0u64 } else { (1u64 << n) - 1 } & !((1u64 << v) - 1);
    let available = (rest & !blocked).count_ones() as usize;
    if count + available <= best.0 {
        return;
    }
    if blocked >> v & 1 == 0 {
        mis_search(
            v + 1,
            n,
            adj,
            chosen | 1 << v,
            blocked | adj[v] | 1 << v,
            count + 1,
            best,
        );
    }
    mis_search(v + 1, n, adj, chosen, blocked, count, best);
}

/// Exact induced matching number; witness is the lexicographically least
/// maximum edge list (edges in canonical order).
pub fn max_induced_matching_bruteforce<G: HostGraph>(
    g: &G,
    caps: &Caps,
) -> Result<(usize, Matching)> {
    let n = g.unified_vertex_count();
    ensure(
        "vertex count for induced matching",
        n as u64,
        caps.im_vertices.min(64) as u64,
    )?;
    let edges = g.unified_edges();
    let mut closed = vec![0u64; n];
    for (v, mask) in closed.iter_mut().enumerate() {
        *mask |= 1 << v;
    }
    for &(u, v) in &edges {
        closed[u] |= 1 << v;
        closed[v] |= 1 << u;
    }
    let all = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut search = ImSearch {
        edges: &edges,
        closed: &closed,
        all,
        chosen: Vec::new(),
        best: Vec::new(),
        found: false,
    };
    search.run(0, 0);
    let witness = search
        .best
        .iter()
        .map(|&i| g.native_edge(edges[i]))
        .collect();
    Ok((search.best.len(), Matching::new(witness)))
}

struct ImSearch<'a> {
    edges: &'a [(usize, usize)],
    closed: &'a [u64],
    all: u64,
    chosen: Vec<usize>,
    best: Vec<usize>,
    found: bool,
}

impl ImSearch<'_> {
    fn run(&mut self, next: usize, blocked: u64) {
        let count = self.chosen.len();
        if next == self.edges.len() {
            if !self.found || count > self.best.len() {
                self.best = self.chosen.clone();
                self.found = true;
            }
            return;
        }
        let free = (self.all & !blocked).count_ones() as usize / 2;
        let bound = count + free.min(self.edges.len() - next);
        if self.found && bound <= self.best.len() {
            return;
        }
        let (u, v) = self.edges[next];
        if blocked >> u & 1 == 0 && blocked >> v & 1 == 0 {
            self.chosen.push(next);
            self.run(next + 1, blocked | self.closed[u] | self.closed[v]);
            self.chosen.pop();
        }
        self.run(next + 1, blocked);
    }
}

/// Maximum `order`-semi-induced matching of a bipartite graph for a fixed order.
///
/// Left vertices are scanned by rank. An edge `(u, w)` fits iff `w` avoids the
/// neighbourhoods of the lower-ranked left ends already taken, so only that
/// union matters for the rest of the scan and it is memoised. The witness
/// prefers taking a vertex when that is no worse, and gives each taken vertex
/// its least admissible right neighbour.
pub fn max_semi_induced_matching_fixed(
    g: &BipartiteGraph,
    order: &VertexOrder,
    caps: &Caps,
) -> Result<(usize, Matching)> {
    ensure(
        "vertex count for semi-induced matching",
        g.vertex_count() as u64,
        caps.sim_vertices.min(64) as u64,
    )?;
    if order.len() != g.vertex_count() {
        return Err(Error::input("vertex order does not match the graph"));
    }
    let mut seq: Vec<usize> = (0..g.left_count()).collect();
    seq.sort_by_key(|&u| order.rank(u));
    let masks = g.left_masks();
    let masks: Vec<u64> = seq.iter().map(|&u| masks[u]).collect();
    let mut memo = HashMap::new();
    let size = fixed_sim(&masks, 0, 0, &mut memo);
    let mut edges = Vec::with_capacity(size);
    let mut blocked = 0u64;
    for (i, &u) in seq.iter().enumerate() {
        let free = masks[i] & !blocked;
        if free == 0 {
            continue;
        }
        let take = 1 + fixed_sim(&masks, i + 1, blocked | masks[i], &mut memo);
        let skip = fixed_sim(&masks, i + 1, blocked, &mut memo);
        if take >= skip {
            edges.push((u, free.trailing_zeros() as usize));
            blocked |= masks[i];
        }
    }
    debug_assert_eq!(edges.len(), size);
    Ok((size, Matching::new(edges)))
}

fn fixed_sim(
    masks: &[u64],
    i: usize,
    blocked: u64,
    memo: &mut HashMap<(usize, u64), usize>,
) -> usize {
    if i == masks.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(i, blocked)) {
        return v;
    }
    let mut best = fixed_sim(masks, i + 1, blocked, memo);
    if masks[i] & !blocked != 0 {
        best = best.max(1 + fixed_sim(masks, i + 1, blocked | masks[i], memo));
    }
    memo.insert((i, blocked), best);
    best
}

/// Maximum semi-induced matching over all orders by enumerating every
/// permutation of the left side (right ranks never matter). Only for graphs
/// with at most `caps.sim_all_orders_vertices` vertices.
///
/// Returns the size, the witness and the first order (lexicographic over left
/// permutations, right vertices appended in index order) that attains it.
pub fn max_semi_induced_matching_all_orders(
    g: &BipartiteGraph,
    caps: &Caps,
) -> Result<(usize, Matching, VertexOrder)> {
    ensure(
        "vertex count for all-order semi-induced matching",
        g.vertex_count() as u64,
        caps.sim_all_orders_vertices as u64,
    )?;
    let left = g.left_count();
    let mut perm: Vec<usize> = (0..left).collect();
    let mut best: Option<(usize, Matching, VertexOrder)> = None;
    loop {
        let sequence: Vec<usize> = perm.iter().copied().chain(left..g.vertex_count()).collect();
        let order = VertexOrder::from_sequence(&sequence)?;
        let (size, witness) = max_semi_induced_matching_fixed(g, &order, caps)?;
        if best.as_ref().is_none_or(|b| size > b.0) {
            best = Some((size, witness, order));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one permutation"))
}

fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// sim(G): maximum semi-induced matching over all orders, computed without
/// enumerating orders.
///
/// Listing the taken left vertices first, in the order they are taken, an
/// addition `u` is possible iff `N(u)` is not inside the union of neighbourhoods
/// taken so far. The state is that union alone, memoised. The returned order
/// lists the witness's left ends in that order, then the other left vertices,
/// then the right side; ties go to the least left index.
pub fn max_semi_induced_matching_any_order(
    g: &BipartiteGraph,
    caps: &Caps,
) -> Result<(usize, Matching, VertexOrder)> {
    ensure(
        "vertex count for semi-induced matching",
        g.vertex_count() as u64,
        caps.sim_vertices.min(64) as u64,
    )?;
    let masks = g.left_masks();
    let mut memo = HashMap::new();
    let size = any_order_sim(&masks, 0, &mut memo);
    let mut edges = Vec::with_capacity(size);
    let mut sequence = Vec::with_capacity(g.vertex_count());
    let mut blocked = 0u64;
    while edges.len() < size {
        let remaining = size - edges.len();
        let u = (0..masks.len())
            .find(|&u| {
                masks[u] & !blocked != 0
                    && 1 + any_order_sim(&masks, blocked | masks[u], &mut memo) == remaining
            })
            .expect("memoised value is attained");
        edges.push((u, (masks[u] & !blocked).trailing_zeros() as usize));
        sequence.push(u);
        blocked |= masks[u];
    }
    let taken: BTreeSet<usize> = sequence.iter().copied().collect();
    sequence.extend((0..g.left_count()).filter(|u| !taken.contains(u)));
    sequence.extend(g.left_count()..g.vertex_count());
    let order = VertexOrder::from_sequence(&sequence).expect("order is a permutation");
    Ok((size, Matching::new(edges), order))
}

fn any_order_sim(masks: &[u64], blocked: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if let Some(&v) = memo.get(&blocked) {
        return v;
    }
    let mut best = 0;
    let mut seen = Vec::new();
    for &m in masks {
        let grown = blocked | m;
        if grown != blocked && !seen.contains(&grown) {
            seen.push(grown);
            best = best.max(1 + any_order_sim(masks, grown, memo));
        }
    }
    memo.insert(blocked, best);
    best
}

/// B[G]: left and right copies of V(G); `(u,1)(w,2)` is an edge iff `uw` is an
/// edge of `g`, or `u == w` when `include_same_vertex_edges` is set.
pub fn bipartite_double_cover(g: &Graph, include_same_vertex_edges: bool) -> BipartiteGraph {
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    if include_same_vertex_edges {
        edges.extend((0..n).map(|u| (u, u)));
    }
    BipartiteGraph::new(n, n, edges).expect("double cover is simple")
}

/// Splits a matching of the double cover (without same-vertex edges) of a
/// bipartite graph `g` into the two induced matchings of `g` it projects to.
///
/// The double cover is taken over `g.to_graph()`. Edges leaving a left copy of
/// a left vertex of `g` go to the first matching, the rest to the second.
pub fn split_double_cover_matching(g: &BipartiteGraph, m: &Matching) -> (Matching, Matching) {
    let left = g.left_count();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for &(x, y) in &m.edges {
        if x < left {
            first.push((x, y - left));
        } else {
            second.push((y, x - left));
        }
    }
    (Matching::new(first), Matching::new(second))
}

/// Largest `k` such that some independent set has exactly `k` vertices on each side.
pub fn balanced_bipartite_independence_bruteforce(
    g: &BipartiteGraph,
    caps: &Caps,
) -> Result<usize> {
    ensure(
        "vertex count for balanced independent set",
        g.vertex_count() as u64,
        caps.bbis_vertices.min(64) as u64,
    )?;
    let (small, other_count, masks) = if g.left_count() <= g.right_count() {
        (g.left_count(), g.right_count(), g.left_masks())
    } else {
        (g.right_count(), g.left_count(), g.right_masks())
    };
    let mut best = 0;
    for subset in 0u64..(1u64 << small) {
        let size = subset.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut covered = 0u64;
        let mut s = subset;
        while s != 0 {
            let i = s.trailing_zeros() as usize;
            s &= s - 1;
            covered |= masks[i];
        }
        let free = other_count - covered.count_ones() as usize;
        best = best.max(size.min(free));
    }
    Ok(best)
}
