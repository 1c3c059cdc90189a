//! Directed transaction multigraph over interned addresses.
//!
//! Nodes are dense ids `0..N-1` assigned in first-appearance order, so graphs
//! built from the same edge list are identical across runs. Parallel arcs are
//! permitted; metric code works on the simple projections produced by
//! [`TxGraph::simple_projection`]. Self-loops are rejected at build time
//! (extraction drops them upstream).

use std::collections::HashMap;

use crate::amount::Btc;
use crate::ingest::Edge;
use crate::ledger::EdgeList;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at arc index {index} ({address})")]
    SelfLoopPresent { index: usize, address: String },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("arc {index} references an unknown node id")]
    InvalidArc { index: usize },
}

/// One directed arc between interned node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphArc {
    pub source: u32,
    pub target: u32,
    pub amount_btc: Btc,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    Directed,
    Undirected,
}

/// A directed multigraph with interned addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxGraph {
    addresses: Vec<String>,
    arcs: Vec<GraphArc>,
    directed: bool,
}

impl TxGraph {
    /// Builds the multigraph from an edge list: one node per distinct address
    /// (first appearance gets the lowest id), one arc per edge.
    pub fn build(edges: &EdgeList) -> Result<TxGraph, GraphError> {
        let mut addresses = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut arcs = Vec::with_capacity(edges.len());
        for (i, e) in edges.edges().iter().enumerate() {
            if e.source == e.target {
                return Err(GraphError::SelfLoopPresent {
                    index: i,
                    address: e.source.clone(),
                });
            }
            let mut intern = |addr: &str| -> u32 {
                if let Some(&id) = index.get(addr) {
                    return id;
                }
                let id = addresses.len() as u32;
                addresses.push(addr.to_string());
                index.insert(addr.to_string(), id);
                id
            };
            let source = intern(&e.source);
            let target = intern(&e.target);
            arcs.push(GraphArc {
                source,
                target,
                amount_btc: e.amount_btc,
                timestamp_ms: e.timestamp_ms,
            });
        }
        Ok(TxGraph {
            addresses,
            arcs,
            directed: true,
        })
    }

    /// Assembles a graph from pre-interned parts (used by GraphML import and
    /// the synthetic generators). Arc endpoints must be valid ids and distinct.
    pub fn from_parts(
        addresses: Vec<String>,
        arcs: Vec<GraphArc>,
        directed: bool,
    ) -> Result<TxGraph, GraphError> {
        let n = addresses.len() as u32;
        for (index, a) in arcs.iter().enumerate() {
            if a.source >= n || a.target >= n {
                return Err(GraphError::InvalidArc { index });
            }
            if a.source == a.target {
                return Err(GraphError::SelfLoopPresent {
                    index,
                    address: addresses[a.source as usize].clone(),
                });
            }
        }
        Ok(TxGraph {
            addresses,
            arcs,
            directed,
        })
    }

    pub fn node_count(&self) -> usize {
        self.addresses.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn address(&self, id: u32) -> &str {
        &self.addresses[id as usize]
    }

    pub fn addresses(&self) -> &[String] {
        &self.addresses
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Out-neighbor lists with multiplicity, indexed by node id.
    pub fn out_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for a in &self.arcs {
            adj[a.source as usize].push(a.target);
        }
        adj
    }

    /// In-neighbor lists with multiplicity, indexed by node id.
    pub fn in_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for a in &self.arcs {
            adj[a.target as usize].push(a.source);
        }
        adj
    }

    /// Collapses parallel arcs; undirected mode additionally merges
    /// antiparallel pairs (arcs stored as `(min, max)`). The node set is
    /// unchanged and the first arc of each collapsed group keeps its
    /// attributes. Idempotent.
    pub fn simple_projection(&self, mode: ProjectionMode) -> TxGraph {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len());
        let mut arcs = Vec::new();
        for a in &self.arcs {
            let (key, arc) = match mode {
                ProjectionMode::Directed => ((a.source, a.target), *a),
                ProjectionMode::Undirected => {
                    let (u, v) = if a.source <= a.target {
                        (a.source, a.target)
                    } else {
                        (a.target, a.source)
                    };
                    (
                        (u, v),
                        GraphArc {
                            source: u,
                            target: v,
                            ..*a
                        },
                    )
                }
            };
            if seen.insert(key) {
                arcs.push(arc);
            }
        }
        TxGraph {
            addresses: self.addresses.clone(),
            arcs,
            directed: matches!(mode, ProjectionMode::Directed) && self.directed,
        }
    }

    /// Induced subgraph on the largest weakly-connected node set, keeping all
    /// original arcs among those nodes. Ties between equal-sized components go
    /// to the one containing the smallest node id. Node ids are re-interned in
    /// ascending original-id order.
    pub fn giant_component(&self) -> Result<TxGraph, GraphError> {
        if self.node_count() == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut uf = UnionFind::new(self.node_count());
        for a in &self.arcs {
            uf.union(a.source as usize, a.target as usize);
        }
        // (size, min id) per root; smallest min id wins ties
        let mut best_root = 0;
        let mut best: (usize, usize) = (0, usize::MAX);
        let mut sizes: HashMap<usize, (usize, usize)> = HashMap::new();
        for v in 0..self.node_count() {
            let r = uf.find(v);
            let entry = sizes.entry(r).or_insert((0, v));
            entry.0 += 1;
        }
        for (&root, &(size, min_id)) in &sizes {
            if size > best.0 || (size == best.0 && min_id < best.1) {
                best = (size, min_id);
                best_root = root;
            }
        }
        let mut remap = vec![u32::MAX; self.node_count()];
        let mut addresses = Vec::with_capacity(best.0);
        for (v, slot) in remap.iter_mut().enumerate() {
            if uf.find(v) == best_root {
                *slot = addresses.len() as u32;
                addresses.push(self.addresses[v].clone());
            }
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|a| remap[a.source as usize] != u32::MAX)
            .map(|a| GraphArc {
                source: remap[a.source as usize],
                target: remap[a.target as usize],
                ..*a
            })
            .collect();
        Ok(TxGraph {
            addresses,
            arcs,
            directed: self.directed,
        })
    }

    /// Materializes the arcs back into an edge list (stable-sorted by
    /// timestamp, which preserves arc order for equal timestamps).
    pub fn to_edge_list(&self) -> EdgeList {
        let mut edges: Vec<Edge> = self
            .arcs
            .iter()
            .map(|a| Edge {
                source: self.addresses[a.source as usize].clone(),
                target: self.addresses[a.target as usize].clone(),
                amount_btc: a.amount_btc,
                timestamp_ms: a.timestamp_ms,
            })
            .collect();
        edges.sort_by_key(|e| e.timestamp_ms);
        EdgeList::from_edges(edges).expect("sorted by construction")
    }
}

/// Union-find with path halving and union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn list(pairs: &[(&str, &str)]) -> EdgeList {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, t))| Edge {
                source: s.into(),
                target: t.into(),
                amount_btc: Btc::from_sat(100_000_000),
                timestamp_ms: i as u64,
            })
            .collect();
        EdgeList::from_edges(edges).unwrap()
    }

    #[test]
    fn build_counts_nodes_and_arcs() {
        let g = TxGraph::build(&list(&[("A", "B"), ("A", "C")])).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.arc_count(), 2);
        // first appearance gets the lowest id
        assert_eq!(g.address(0), "A");
        assert_eq!(g.address(1), "B");
        assert_eq!(g.address(2), "C");
    }

    #[test]
    fn build_keeps_parallel_arcs() {
        let g = TxGraph::build(&list(&[("A", "B"), ("A", "B")])).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn build_rejects_self_loop() {
        let err = TxGraph::build(&list(&[("A", "A")]));
        assert!(matches!(err, Err(GraphError::SelfLoopPresent { index: 0, .. })));
    }

    #[test]
    fn directed_projection_collapses_parallel_arcs() {
        let g = TxGraph::build(&list(&[("A", "B"), ("A", "B"), ("B", "A")])).unwrap();
        let p = g.simple_projection(ProjectionMode::Directed);
        assert_eq!(p.arc_count(), 2); // A->B and B->A stay distinct
        assert_eq!(p.node_count(), 2);
    }

    #[test]
    fn undirected_projection_merges_antiparallel_arcs() {
        let g = TxGraph::build(&list(&[("A", "B"), ("B", "A")])).unwrap();
        let p = g.simple_projection(ProjectionMode::Undirected);
        assert_eq!(p.arc_count(), 1);
        assert!(!p.is_directed());
    }

    #[test]
    fn projection_is_idempotent() {
        let g = TxGraph::build(&list(&[("A", "B"), ("B", "C"), ("A", "B")])).unwrap();
        let p = g.simple_projection(ProjectionMode::Directed);
        assert_eq!(p, p.simple_projection(ProjectionMode::Directed));
    }

    #[test]
    fn giant_component_picks_largest() {
        let g = TxGraph::build(&list(&[("A", "B"), ("B", "C"), ("D", "E")])).unwrap();
        let giant = g.giant_component().unwrap();
        assert_eq!(giant.node_count(), 3);
        assert_eq!(giant.arc_count(), 2);
        assert_eq!(giant.address(0), "A");
    }

    #[test]
    fn giant_component_of_connected_graph_is_identity() {
        let g = TxGraph::build(&list(&[("A", "B"), ("B", "C")])).unwrap();
        let giant = g.giant_component().unwrap();
        assert_eq!(giant, g);
    }

    #[test]
    fn giant_component_tie_breaks_on_smallest_id() {
        // two 3-node components; D-E-F appears after A-B-C
        let g = TxGraph::build(&list(&[("D", "E"), ("E", "F"), ("A", "B"), ("B", "C")])).unwrap();
        let giant = g.giant_component().unwrap();
        assert_eq!(giant.node_count(), 3);
        // D interned first (id 0), so the D-E-F component wins the tie
        assert_eq!(giant.address(0), "D");
    }

    #[test]
    fn giant_component_of_empty_graph_fails() {
        let g = TxGraph::build(&list(&[])).unwrap();
        assert!(matches!(g.giant_component(), Err(GraphError::EmptyGraph)));
    }

    #[test]
    fn edge_list_roundtrip_preserves_arcs() {
        let l = list(&[("A", "B"), ("B", "C"), ("A", "B")]);
        let g = TxGraph::build(&l).unwrap();
        assert_eq!(g.to_edge_list(), l);
    }
}
