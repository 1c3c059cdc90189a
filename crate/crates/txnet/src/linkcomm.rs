//! Link communities: clusters of edges rather than nodes, so a node can
//! belong to several communities through its incident edges.
//!
//! Adjacent edges (sharing exactly one endpoint) are scored by the Jaccard
//! similarity of the inclusive neighborhoods of their non-shared endpoints.
//! Edges are then clustered by single linkage and the dendrogram is cut at
//! the height maximizing partition density. Merge levels are processed in
//! decreasing similarity with lexicographic edge-id tie-breaks, and equal
//! densities prefer the lower cut, so detection is fully deterministic (the
//! all-equal star collapses into one community).

use serde::Serialize;

use crate::graph::{ProjectionMode, TxGraph, UnionFind};

#[derive(Debug, thiserror::Error)]
pub enum CommunityError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("edges share {shared} endpoints, need exactly 1")]
    NotAdjacent { shared: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// A hard partition of the undirected simple edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityPartition {
    /// Edge sets identified by endpoint id pairs `(u, v)`, `u < v`; each
    /// community sorted, communities ordered by their smallest edge.
    pub communities: Vec<Vec<(u32, u32)>>,
    /// Per node id, the sorted communities containing an incident edge.
    pub node_membership: Vec<Vec<usize>>,
    pub partition_density: f64,
}

/// Directed activity of one community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityProfile {
    pub community: usize,
    pub edge_count: usize,
    pub node_count: usize,
    /// Per member node, degrees restricted to community edges, with
    /// directions taken from the directed simple projection.
    pub nodes: Vec<NodeActivity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeActivity {
    pub node: u32,
    pub in_degree: u64,
    pub out_degree: u64,
}

/// Sorted undirected simple edges `(u, v)`, `u < v`; index = edge id.
fn undirected_edges(g: &TxGraph) -> Vec<(u32, u32)> {
    let p = g.simple_projection(ProjectionMode::Undirected);
    let mut edges: Vec<(u32, u32)> = p.arcs().iter().map(|a| (a.source, a.target)).collect();
    edges.sort_unstable();
    edges
}

/// Inclusive neighborhoods (node plus neighbors), sorted, from an undirected
/// edge list.
fn inclusive_neighborhoods(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut nbhd = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbhd[u as usize].push(v);
        nbhd[v as usize].push(u);
    }
    for (v, list) in nbhd.iter_mut().enumerate() {
        list.push(v as u32);
        list.sort_unstable();
    }
    nbhd
}

fn jaccard(a: &[u32], b: &[u32]) -> f64 {
    let (mut i, mut j, mut both) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                both += 1;
                i += 1;
                j += 1;
            }
        }
    }
    both as f64 / (a.len() + b.len() - both) as f64
}

/// Similarity of two adjacent edges: Jaccard of the inclusive neighborhoods
/// of the two non-shared endpoints. Fails unless the edges share exactly one
/// endpoint.
pub fn edge_similarity(
    g: &TxGraph,
    e1: (u32, u32),
    e2: (u32, u32),
) -> Result<f64, CommunityError> {
    let ends = |e: (u32, u32)| [e.0, e.1];
    let shared: Vec<u32> = ends(e1)
        .into_iter()
        .filter(|k| ends(e2).contains(k))
        .collect();
    if shared.len() != 1 {
        return Err(CommunityError::NotAdjacent {
            shared: shared.len(),
        });
    }
    let k = shared[0];
    let i = if e1.0 == k { e1.1 } else { e1.0 };
    let j = if e2.0 == k { e2.1 } else { e2.0 };
    let edges = undirected_edges(g);
    let nbhd = inclusive_neighborhoods(g.node_count(), &edges);
    Ok(jaccard(&nbhd[i as usize], &nbhd[j as usize]))
}

/// All adjacent-edge similarity triples `(similarity, edge a, edge b)`,
/// `a < b`, enumerated per shared endpoint.
pub fn edge_similarities_seq(edges: &[(u32, u32)], n: usize) -> Vec<(f64, u32, u32)> {
    let nbhd = inclusive_neighborhoods(n, edges);
    let incident = incident_edges(n, edges);
    incident
        .iter()
        .flat_map(|list| node_events(list, edges, &nbhd))
        .collect()
}

/// Rayon fan-out over shared endpoints; same multiset as the sequential form.
#[cfg(feature = "parallel")]
pub fn edge_similarities_par(edges: &[(u32, u32)], n: usize) -> Vec<(f64, u32, u32)> {
    use rayon::prelude::*;
    let nbhd = inclusive_neighborhoods(n, edges);
    let incident = incident_edges(n, edges);
    incident
        .par_iter()
        .flat_map_iter(|list| node_events(list, edges, &nbhd))
        .collect()
}

fn incident_edges(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut incident = vec![Vec::new(); n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incident[u as usize].push(id as u32);
        incident[v as usize].push(id as u32);
    }
    incident
}

fn node_events<'a>(
    list: &'a [u32],
    edges: &'a [(u32, u32)],
    nbhd: &'a [Vec<u32>],
) -> impl Iterator<Item = (f64, u32, u32)> + 'a {
    (0..list.len()).flat_map(move |a| {
        (a + 1..list.len()).map(move |b| {
            let (ea, eb) = (list[a], list[b]);
            let (u1, v1) = edges[ea as usize];
            let (u2, v2) = edges[eb as usize];
            // the shared endpoint is the one present in both edges
            let k = if u1 == u2 || u1 == v2 { u1 } else { v1 };
            let i = if u1 == k { v1 } else { u1 };
            let j = if u2 == k { v2 } else { u2 };
            let sim = jaccard(&nbhd[i as usize], &nbhd[j as usize]);
            (sim, ea.min(eb), ea.max(eb))
        })
    })
}

/// Contribution of one community to partition density: communities with more
/// than two nodes weigh in by their normalized internal edge density, others
/// contribute zero.
fn community_weight(m: u64, n: u64) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    m as f64 * (m as f64 - (n as f64 - 1.0)) / ((n as f64 - 2.0) * (n as f64 - 1.0))
}

/// Partition density `D = (2/M) sum_c m_c (m_c - n_c + 1) / ((n_c-2)(n_c-1))`
/// of an explicit partition; validates that it covers every edge exactly once.
pub fn partition_density(
    g: &TxGraph,
    communities: &[Vec<(u32, u32)>],
) -> Result<f64, CommunityError> {
    let edges = undirected_edges(g);
    let mut seen = std::collections::HashSet::new();
    let mut total = 0.0;
    for community in communities {
        let mut nodes = std::collections::HashSet::new();
        for &(u, v) in community {
            let key = (u.min(v), u.max(v));
            if edges.binary_search(&key).is_err() {
                return Err(CommunityError::InvalidPartition(format!(
                    "({u}, {v}) is not an edge of the graph"
                )));
            }
            if !seen.insert(key) {
                return Err(CommunityError::InvalidPartition(format!(
                    "edge ({u}, {v}) appears twice"
                )));
            }
            nodes.insert(u);
            nodes.insert(v);
        }
        total += community_weight(community.len() as u64, nodes.len() as u64);
    }
    if seen.len() != edges.len() {
        return Err(CommunityError::InvalidPartition(format!(
            "{} of {} edges uncovered",
            edges.len() - seen.len(),
            edges.len()
        )));
    }
    if edges.is_empty() {
        return Ok(0.0);
    }
    Ok(2.0 / edges.len() as f64 * total)
}

/// Single-linkage link-community detection with a partition-density cut.
pub fn detect_link_communities(g: &TxGraph) -> Result<CommunityPartition, CommunityError> {
    if g.node_count() == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    let edges = undirected_edges(g);
    let m = edges.len();
    if m == 0 {
        return Ok(CommunityPartition {
            communities: Vec::new(),
            node_membership: vec![Vec::new(); g.node_count()],
            partition_density: 0.0,
        });
    }

    #[cfg(feature = "parallel")]
    let mut events = edge_similarities_par(&edges, g.node_count());
    #[cfg(not(feature = "parallel"))]
    let mut events = edge_similarities_seq(&edges, g.node_count());
    events.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    // Pass 1: walk merge levels (equal similarities merge together), tracking
    // the density-maximizing level; ties prefer the later (lower) cut.
    let mut clusters = ClusterState::new(&edges);
    let mut best_level: isize = -1; // -1 = the all-singletons cut (D = 0)
    let mut best_density = 0.0;
    let mut level = 0isize;
    let mut i = 0;
    while i < events.len() {
        let sim = events[i].0;
        while i < events.len() && events[i].0 == sim {
            clusters.merge(events[i].1, events[i].2);
            i += 1;
        }
        let density = 2.0 / m as f64 * clusters.total_weight;
        if density >= best_density {
            best_density = density;
            best_level = level;
        }
        level += 1;
    }

    // Pass 2: rebuild the clustering up to the chosen level.
    let mut clusters = ClusterState::new(&edges);
    let mut level = 0isize;
    let mut i = 0;
    while i < events.len() && level <= best_level {
        let sim = events[i].0;
        while i < events.len() && events[i].0 == sim {
            clusters.merge(events[i].1, events[i].2);
            i += 1;
        }
        level += 1;
    }

    // Collect communities in smallest-edge-id order.
    let mut by_root: std::collections::HashMap<u32, Vec<(u32, u32)>> =
        std::collections::HashMap::new();
    for id in 0..m as u32 {
        let root = clusters.uf.find(id as usize) as u32;
        by_root.entry(root).or_default().push(edges[id as usize]);
    }
    let mut communities: Vec<Vec<(u32, u32)>> = by_root.into_values().collect();
    for c in &mut communities {
        c.sort_unstable();
    }
    communities.sort();

    let mut node_membership = vec![Vec::new(); g.node_count()];
    for (idx, community) in communities.iter().enumerate() {
        for &(u, v) in community {
            for node in [u, v] {
                let list: &mut Vec<usize> = &mut node_membership[node as usize];
                if list.last() != Some(&idx) {
                    list.push(idx);
                }
            }
        }
    }

    Ok(CommunityPartition {
        partition_density: 2.0 / m as f64 * clusters.total_weight,
        communities,
        node_membership,
    })
}

/// Union-find over edges with per-root edge counts and node sets, maintaining
/// the running density sum incrementally.
struct ClusterState {
    uf: UnionFind,
    edge_count: Vec<u64>,
    nodes: Vec<std::collections::HashSet<u32>>,
    total_weight: f64,
}

impl ClusterState {
    fn new(edges: &[(u32, u32)]) -> ClusterState {
        ClusterState {
            uf: UnionFind::new(edges.len()),
            edge_count: vec![1; edges.len()],
            nodes: edges
                .iter()
                .map(|&(u, v)| std::collections::HashSet::from([u, v]))
                .collect(),
            total_weight: 0.0,
        }
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.uf.find(a as usize), self.uf.find(b as usize));
        if ra == rb {
            return;
        }
        let wa = community_weight(self.edge_count[ra], self.nodes[ra].len() as u64);
        let wb = community_weight(self.edge_count[rb], self.nodes[rb].len() as u64);
        self.uf.union(ra, rb);
        let root = self.uf.find(ra);
        let other = if root == ra { rb } else { ra };
        let moved = std::mem::take(&mut self.nodes[other]);
        // small-to-large keeps total set work near-linear
        if self.nodes[root].len() < moved.len() {
            let big = std::mem::replace(&mut self.nodes[root], moved);
            self.nodes[root].extend(big);
        } else {
            self.nodes[root].extend(moved);
        }
        self.edge_count[root] = self.edge_count[ra] + self.edge_count[rb];
        let merged = community_weight(self.edge_count[root], self.nodes[root].len() as u64);
        self.total_weight += merged - wa - wb;
    }
}

/// Per-community directed degree profiles; validates the partition.
pub fn community_profiles(
    g: &TxGraph,
    partition: &CommunityPartition,
) -> Result<Vec<CommunityProfile>, CommunityError> {
    partition_density(g, &partition.communities)?;
    let directed = g.simple_projection(ProjectionMode::Directed);
    let arcs: std::collections::HashSet<(u32, u32)> = directed
        .arcs()
        .iter()
        .map(|a| (a.source, a.target))
        .collect();
    let mut profiles = Vec::with_capacity(partition.communities.len());
    for (idx, community) in partition.communities.iter().enumerate() {
        let mut degrees: std::collections::BTreeMap<u32, (u64, u64)> =
            std::collections::BTreeMap::new();
        for &(u, v) in community {
            degrees.entry(u).or_default();
            degrees.entry(v).or_default();
            if arcs.contains(&(u, v)) {
                degrees.get_mut(&u).unwrap().1 += 1;
                degrees.get_mut(&v).unwrap().0 += 1;
            }
            if arcs.contains(&(v, u)) {
                degrees.get_mut(&v).unwrap().1 += 1;
                degrees.get_mut(&u).unwrap().0 += 1;
            }
        }
        profiles.push(CommunityProfile {
            community: idx,
            edge_count: community.len(),
            node_count: degrees.len(),
            nodes: degrees
                .into_iter()
                .map(|(node, (in_degree, out_degree))| NodeActivity {
                    node,
                    in_degree,
                    out_degree,
                })
                .collect(),
        });
    }
    Ok(profiles)
}

/// The serialized community document: communities as address pairs, plus
/// profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityReport {
    pub partition_density: f64,
    pub communities: Vec<Vec<[String; 2]>>,
    pub profiles: Vec<ProfileReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub community: usize,
    pub edge_count: usize,
    pub node_count: usize,
    pub nodes: Vec<NodeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport {
    pub address: String,
    pub in_degree: u64,
    pub out_degree: u64,
}

/// Builds the exportable report for a detected partition.
pub fn community_report(
    g: &TxGraph,
    partition: &CommunityPartition,
) -> Result<CommunityReport, CommunityError> {
    let profiles = community_profiles(g, partition)?
        .into_iter()
        .map(|p| ProfileReport {
            community: p.community,
            edge_count: p.edge_count,
            node_count: p.node_count,
            nodes: p
                .nodes
                .into_iter()
                .map(|n| NodeReport {
                    address: g.address(n.node).to_string(),
                    in_degree: n.in_degree,
                    out_degree: n.out_degree,
                })
                .collect(),
        })
        .collect();
    Ok(CommunityReport {
        partition_density: partition.partition_density,
        communities: partition
            .communities
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&(u, v)| [g.address(u).to_string(), g.address(v).to_string()])
                    .collect()
            })
            .collect(),
        profiles,
    })
}

impl CommunityReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
