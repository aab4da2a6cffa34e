//! Induced matching solvers: exact search over the smaller side of a
//! bipartite graph, and the block-partition r-approximations for bipartite
//! and general graphs.

use crate::caps::{ensure, Caps};
use crate::error::{Error, Result};
use crate::graphs::{BipartiteGraph, Graph, Matching};

/// Result of a block-partition approximation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSolution {
    /// The largest block optimum, as a matching of the input graph.
    pub matching: Matching,
    /// Index of the block that produced `matching` (lowest index on ties).
    pub best_block: usize,
    /// Optimum found in each block; their sum is at least im(G).
    pub block_sizes: Vec<usize>,
}

impl BlockSolution {
    pub fn size(&self) -> usize {
        self.matching.len()
    }

    pub fn block_total(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

/// Round-robin blocks: vertex `v` goes to block `v % r`.
pub fn round_robin_blocks(count: usize, r: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); r];
    for v in 0..count {
        blocks[v % r].push(v);
    }
    blocks
}

/// Maximum induced matching of a bipartite graph in time exponential in the
/// smaller side only.
///
/// A subset `S` of the smaller side is the set of matched vertices of some
/// induced matching iff every `u` in `S` has a neighbour whose only neighbour
/// in `S` is `u`. Each matched vertex takes its least-index such neighbour.
/// Among maximum subsets the numerically smallest bitmask is returned.
pub fn exact_bipartite_induced_matching(
    g: &BipartiteGraph,
    caps: &Caps,
) -> Result<(usize, Matching)> {
    if g.left_count() <= g.right_count() {
        exact_on_left(g, caps)
    } else {
        let (size, m) = exact_on_left(&g.transpose(), caps)?;
        let edges = m.edges.into_iter().map(|(w, u)| (u, w)).collect();
        Ok((size, Matching::new(edges)))
    }
}

fn exact_on_left(g: &BipartiteGraph, caps: &Caps) -> Result<(usize, Matching)> {
    let side = g.left_count();
    ensure(
        "smaller side for exact bipartite induced matching",
        side as u64,
        caps.exact_bipartite_side.min(32) as u64,
    )?;
    let nbr: Vec<u32> = (0..g.right_count())
        .map(|w| g.right_neighbors(w).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let good_neighbor = |u: usize, subset: u32| {
        g.left_neighbors(u)
            .iter()
            .copied()
            .find(|&w| nbr[w] & subset == 1 << u)
    };
    let mut best = (0u32, 0u32);
    for subset in 1u32..=((1u64 << side) - 1) as u32 {
        let size = subset.count_ones();
        if size <= best.0 {
            continue;
        }
        let mut rest = subset;
        let mut ok = true;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if good_neighbor(u, subset).is_none() {
                ok = false;
                break;
            }
        }
        if ok {
            best = (size, subset);
        }
    }
    let subset = best.1;
    let edges = (0..side)
        .filter(|&u| subset >> u & 1 == 1)
        .map(|u| (u, good_neighbor(u, subset).expect("checked above")))
        .collect();
    Ok((best.0 as usize, Matching::new(edges)))
}

/// r-approximation for bipartite graphs: split the smaller side into `r`
/// round-robin blocks, solve each `G[U_i ∪ W]` exactly and keep the best.
pub fn approx_induced_matching_bipartite(
    g: &BipartiteGraph,
    r: usize,
    caps: &Caps,
) -> Result<BlockSolution> {
    if r == 0 {
        return Err(Error::input("r must be at least 1"));
    }
    let transposed = g.left_count() > g.right_count();
    let host = if transposed { g.transpose() } else { g.clone() };
    let mut block_sizes = Vec::with_capacity(r);
    let mut best: Option<(usize, Matching)> = None;
    for (index, block) in round_robin_blocks(host.left_count(), r)
        .into_iter()
        .enumerate()
    {
        let sub = host.restrict_left(&block);
        let (size, m) = exact_bipartite_induced_matching(&sub, caps)?;
        block_sizes.push(size);
        if best.as_ref().is_none_or(|b| size > b.1.len()) {
            let edges = m
                .edges
                .iter()
                .map(|&(i, w)| {
                    let u = block[i];
                    if transposed {
                        (w, u)
                    } else {
                        (u, w)
                    }
                })
                .collect();
            best = Some((index, Matching::new(edges)));
        }
    }
    let (best_block, matching) = best.expect("r >= 1 blocks");
    Ok(BlockSolution {
        matching,
        best_block,
        block_sizes,
    })
}

/// r-approximation for general graphs: split V into `r` round-robin blocks;
/// for each block pick, for every block vertex, one incident edge or none,
/// and keep the largest choice that is an induced matching of `g`.
///
/// Refuses when a block's choice count (product of `deg + 1`) exceeds
/// `caps.general_block_work`.
pub fn approx_induced_matching_general(g: &Graph, r: usize, caps: &Caps) -> Result<BlockSolution> {
    if r == 0 {
        return Err(Error::input("r must be at least 1"));
    }
    ensure(
        "vertex count for general induced matching",
        g.vertex_count() as u64,
        64,
    )?;
    let blocks = round_robin_blocks(g.vertex_count(), r);
    for (index, block) in blocks.iter().enumerate() {
        let work = block
            .iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(g.degree(v) as u128 + 1));
        if work > u128::from(caps.general_block_work) {
            return Err(Error::refused(
                format!("choice count of block {index}"),
                work,
                caps.general_block_work,
            ));
        }
    }
    let mut closed: Vec<u64> = (0..g.vertex_count()).map(|v| 1u64 << v).collect();
    for &(u, v) in g.edges() {
        closed[u] |= 1 << v;
        closed[v] |= 1 << u;
    }
    let mut block_sizes = Vec::with_capacity(r);
    let mut best: Option<(usize, Vec<(usize, usize)>)> = None;
    for (index, block) in blocks.iter().enumerate() {
        let mut search = BlockSearch {
            g,
            block,
            closed: &closed,
            chosen: Vec::new(),
            best: Vec::new(),
            found: false,
        };
        search.run(0, 0, 0);
        block_sizes.push(search.best.len());
        if best.as_ref().is_none_or(|b| search.best.len() > b.1.len()) {
            best = Some((index, search.best));
        }
    }
    let (best_block, edges) = best.expect("r >= 1 blocks");
    Ok(BlockSolution {
        matching: Matching::new(edges),
        best_block,
        block_sizes,
    })
}

struct BlockSearch<'a> {
    g: &'a Graph,
    block: &'a [usize],
    closed: &'a [u64],
    chosen: Vec<(usize, usize)>,
    best: Vec<(usize, usize)>,
    found: bool,
}

impl BlockSearch<'_> {
    fn run(&mut self, position: usize, used: u64, blocked: u64) {
        let count = self.chosen.len();
        if position == self.block.len() {
            if !self.found || count > self.best.len() {
                self.best = self.chosen.clone();
                self.found = true;
            }
            return;
        }
        if self.found && count + (self.block.len() - position) <= self.best.len() {
            return;
        }
        let v = self.block[position];
        if used >> v & 1 == 0 && blocked >> v & 1 == 0 {
            for &x in self.g.neighbors(v) {
                if blocked >> x & 1 == 0 {
                    self.chosen.push((v.min(x), v.max(x)));
                    self.run(
                        position + 1,
                        used | 1 << v | 1 << x,
                        blocked | self.closed[v] | self.closed[x],
                    );
                    self.chosen.pop();
                }
            }
        }
        self.run(position + 1, used, blocked);
    }
}
