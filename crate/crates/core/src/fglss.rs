//! FGLSS conflict graph of a CSP and the disperser replacement that thins
//! each variable's conflict biclique.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::{ensure, Caps};
use crate::csp::{Clause, CspInstance};
use crate::error::{Error, Result};
use crate::graphs::{BipartiteGraph, Graph};

/// Vertex label: (clause index, satisfying pattern of that clause).
pub type Label = (usize, u64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fglss {
    pub graph: Graph,
    pub labels: Vec<Label>,
}

/// One vertex per (clause, satisfying pattern), in clause order then pattern
/// order. Two vertices are adjacent iff their patterns give some shared
/// variable different values; two patterns of one clause are always adjacent.
pub fn fglss_build(csp: &CspInstance, caps: &Caps) -> Result<Fglss> {
    ensure(
        "FGLSS vertex count",
        csp.pattern_total() as u64,
        caps.fglss_vertices as u64,
    )?;
    let labels: Vec<Label> = csp
        .clauses()
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.satisfying().iter().map(move |&p| (j, p)))
        .collect();
    let mut edges = BTreeSet::new();
    for block in conflict_blocks(csp, &labels) {
        for &u in &block.ones {
            for &w in &block.zeros {
                edges.insert((u.min(w), u.max(w)));
            }
        }
    }
    edges.extend(same_clause_pairs(&labels));
    let graph = Graph::new(labels.len(), edges)?;
    Ok(Fglss { graph, labels })
}

/// The vertices whose pattern sets variable `var` to 1 (`ones`) and to 0 (`zeros`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictBlock {
    pub var: usize,
    pub ones: Vec<usize>,
    pub zeros: Vec<usize>,
}

pub fn conflict_blocks(csp: &CspInstance, labels: &[Label]) -> Vec<ConflictBlock> {
    let mut blocks: Vec<ConflictBlock> = (0..csp.num_vars())
        .map(|var| ConflictBlock {
            var,
            ones: Vec::new(),
            zeros: Vec::new(),
        })
        .collect();
    for (vertex, &(j, pattern)) in labels.iter().enumerate() {
        for (k, &var) in csp.clauses()[j].vars().iter().enumerate() {
            if Clause::bit(pattern, k) {
                blocks[var].ones.push(vertex);
            } else {
                blocks[var].zeros.push(vertex);
            }
        }
    }
    blocks
}

fn same_clause_pairs(labels: &[Label]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut start = 0;
    while start < labels.len() {
        let mut end = start;
        while end < labels.len() && labels[end].0 == labels[start].0 {
            end += 1;
        }
        for u in start..end {
            pairs.extend((u + 1..end).map(|w| (u, w)));
        }
        start = end;
    }
    pairs
}

/// Provides the bipartite graph that replaces one variable's conflict biclique.
pub trait DisperserSupplier {
    /// An `n x n` bipartite graph for variable `var`.
    fn supply(&mut self, var: usize, n: usize) -> Result<BipartiteGraph>;
}

/// Supplies the full biclique, which leaves the FGLSS graph unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompleteSupplier;

impl DisperserSupplier for CompleteSupplier {
    fn supply(&mut self, _var: usize, n: usize) -> Result<BipartiteGraph> {
        Ok(BipartiteGraph::complete(n, n))
    }
}

/// Whether two patterns of the same clause stay adjacent after replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Exclusivity {
    /// Same-clause vertices stay pairwise adjacent (at most one per clause).
    #[default]
    KeepClauseCliques,
    /// Only disperser edges remain.
    DispersersOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replaced {
    /// The replaced graph Ĝ.
    pub graph: Graph,
    /// Union of the disperser edges only.
    pub conflict_graph: Graph,
    /// Per variable: its block and the graph that replaced it (sides `ones` x `zeros`).
    pub blocks: Vec<(ConflictBlock, BipartiteGraph)>,
}

/// Replaces each variable's conflict biclique `ones x zeros` by an `n x n`
/// graph from `supplier` on the same vertex sets (`ones[i]` is left `i`,
/// `zeros[j]` is right `j`). Every variable's block must be balanced.
pub fn disperser_replace(
    fglss: &Fglss,
    csp: &CspInstance,
    supplier: &mut dyn DisperserSupplier,
    exclusivity: Exclusivity,
) -> Result<Replaced> {
    if fglss.labels.len() != fglss.graph.vertex_count() {
        return Err(Error::input("labels do not match the FGLSS graph"));
    }
    if let Some(&(j, _)) = fglss
        .labels
        .iter()
        .find(|&&(j, _)| j >= csp.clauses().len())
    {
        return Err(Error::input(format!("label refers to missing clause {j}")));
    }
    let mut conflict = BTreeSet::new();
    let mut blocks = Vec::new();
    for block in conflict_blocks(csp, &fglss.labels) {
        if block.ones.len() != block.zeros.len() {
            return Err(Error::input(format!(
                "variable {} is unbalanced: {} patterns set it to 1, {} set it to 0",
                block.var,
                block.ones.len(),
                block.zeros.len()
            )));
        }
        let n = block.ones.len();
        if n == 0 {
            continue;
        }
        let replacement = supplier.supply(block.var, n)?;
        if replacement.left_count() != n || replacement.right_count() != n {
            return Err(Error::input(format!(
                "supplier returned a {}x{} graph for variable {} (needs {n}x{n})",
                replacement.left_count(),
                replacement.right_count(),
                block.var
            )));
        }
        for &(i, j) in replacement.edges() {
            let (u, w) = (block.ones[i], block.zeros[j]);
            conflict.insert((u.min(w), u.max(w)));
        }
        blocks.push((block, replacement));
    }
    let n = fglss.graph.vertex_count();
    let conflict_graph = Graph::new(n, conflict.iter().copied())?;
    let mut all = conflict;
    if exclusivity == Exclusivity::KeepClauseCliques {
        all.extend(same_clause_pairs(&fglss.labels));
    }
    let graph = Graph::new(n, all)?;
    Ok(Replaced {
        graph,
        conflict_graph,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::parse_pattern;

    fn clause(vars: &[usize], pats: &[&str]) -> Clause {
        Clause::new(
            vars.to_vec(),
            pats.iter()
                .map(|p| parse_pattern(p, vars.len()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_clause_two_patterns() {
        let csp = CspInstance::new(1, vec![clause(&[0], &["0", "1"])]).unwrap();
        let f = fglss_build(&csp, &Caps::DESK).unwrap();
        assert_eq!(f.graph.vertex_count(), 2);
        assert_eq!(f.graph.edge_count(), 1);
        assert_eq!(f.labels, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn vertex_count_matches_patterns() {
        let csp = CspInstance::random(5, 4, 3, 2).unwrap();
        let f = fglss_build(&csp, &Caps::DESK).unwrap();
        assert_eq!(f.graph.vertex_count(), csp.pattern_total());
    }

    #[test]
    fn cap_refusal() {
        let csp = CspInstance::random(8, 6, 3, 2).unwrap();
        let caps = Caps {
            fglss_vertices: 1,
            ..Caps::DESK
        };
        assert!(fglss_build(&csp, &caps).unwrap_err().is_refusal());
    }

    #[test]
    fn complete_supplier_is_identity() {
        let csp = CspInstance::random_balanced(5, 4, 3, 3).unwrap();
        let f = fglss_build(&csp, &Caps::DESK).unwrap();
        let r = disperser_replace(&f, &csp, &mut CompleteSupplier, Exclusivity::DispersersOnly)
            .unwrap();
        assert_eq!(r.graph, f.graph);
        let kept = disperser_replace(
            &f,
            &csp,
            &mut CompleteSupplier,
            Exclusivity::KeepClauseCliques,
        )
        .unwrap();
        assert_eq!(kept.graph, f.graph);
    }

    #[test]
    fn unbalanced_variable_is_named() {
        let csp = CspInstance::new(2, vec![clause(&[0, 1], &["10", "11", "01"])]).unwrap();
        let f = fglss_build(&csp, &Caps::DESK).unwrap();
        let err =
            disperser_replace(&f, &csp, &mut CompleteSupplier, Exclusivity::default()).unwrap_err();
        assert!(err.to_string().contains("variable 0"), "{err}");
    }

    struct Matchings;

    impl DisperserSupplier for Matchings {
        fn supply(&mut self, _var: usize, n: usize) -> Result<BipartiteGraph> {
            Ok(BipartiteGraph::perfect_matching(n))
        }
    }

    #[test]
    fn sparse_supplier_bounds_conflict_degree() {
        let csp = CspInstance::random_balanced(6, 6, 3, 5).unwrap();
        let f = fglss_build(&csp, &Caps::DESK).unwrap();
        let r = disperser_replace(&f, &csp, &mut Matchings, Exclusivity::default()).unwrap();
        for v in 0..r.conflict_graph.vertex_count() {
            assert!(r.conflict_graph.degree(v) <= 3);
        }
        for &(u, w) in r.graph.edges() {
            assert!(f.graph.has_edge(u, w));
        }
    }
}
