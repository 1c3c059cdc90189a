//! Snapshot metric battery: degree statistics, dyad census, triangles,
//! transitivity, reciprocity, distances, diameter and maximal cliques.
//!
//! Degree counts and mean degree act on the raw multigraph (parallel arcs
//! count); census, transitivity, reciprocity and distance metrics act on the
//! simple projections, matching the semantics of the usual R/igraph pipeline.
//! Per-source BFS runs on rayon when the `parallel` feature is enabled;
//! results accumulate as integer hop sums and pair counts, so the merged
//! averages are identical for any schedule or thread count.

use serde::Serialize;

use crate::graph::{ProjectionMode, TxGraph};

/// Cap on enumerated maximal cliques; exceeding it signals adversarial density.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 10_000_000;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("no reachable ordered pairs")]
    NoReachablePairs,
    #[error("clique enumeration exceeded budget of {budget}")]
    CliqueBudgetExceeded { budget: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    #[default]
    Directed,
    Undirected,
}

/// Dyad census over the directed simple projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadCensus {
    pub mutual: u64,
    pub asymmetric: u64,
    pub null: u64,
}

impl DyadCensus {
    /// Pairs connected by at least one arc.
    pub fn connected(&self) -> u64 {
        self.mutual + self.asymmetric
    }
}

/// The serialized snapshot record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub snapshot_label: String,
    /// Largest edge timestamp in the snapshot (0 when empty); derived from the
    /// data so reports are byte-identical across runs.
    pub generated_at_ms: u64,
    pub nodes: u64,
    pub edges: u64,
    pub diameter: Option<u64>,
    pub max_clique_size: u64,
    pub dyads_connected: u64,
    pub triangles: u64,
    /// Rounded to 4 decimal places.
    pub reciprocity: f64,
    pub transitivity_global: f64,
    pub transitivity_avg_local: f64,
    pub mean_degree: f64,
    pub mean_distance: Option<f64>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Per-node degrees in id order, on the raw multigraph.
pub fn degree_sequence(g: &TxGraph, mode: DegreeMode) -> Vec<u64> {
    let mut degrees = vec![0u64; g.node_count()];
    for a in g.arcs() {
        match mode {
            DegreeMode::In => degrees[a.target as usize] += 1,
            DegreeMode::Out => degrees[a.source as usize] += 1,
            DegreeMode::Total => {
                degrees[a.source as usize] += 1;
                degrees[a.target as usize] += 1;
            }
        }
    }
    degrees
}

/// `2|E| / |V|` on the raw multigraph.
pub fn mean_degree(g: &TxGraph) -> Result<f64, MetricsError> {
    if g.node_count() == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    Ok(mean_degree_from_counts(
        g.node_count() as u64,
        g.arc_count() as u64,
    ))
}

/// The mean-degree arithmetic on raw counts (integer doubling before the
/// single division).
pub fn mean_degree_from_counts(nodes: u64, edges: u64) -> f64 {
    (2 * edges) as f64 / nodes as f64
}

/// Classifies all unordered node pairs of the directed simple projection.
pub fn dyad_census(g: &TxGraph) -> DyadCensus {
    let p = g.simple_projection(ProjectionMode::Directed);
    let mut pairs: std::collections::HashMap<(u32, u32), u8> = std::collections::HashMap::new();
    for a in p.arcs() {
        let (key, bit) = if a.source < a.target {
            ((a.source, a.target), 1u8)
        } else {
            ((a.target, a.source), 2u8)
        };
        *pairs.entry(key).or_insert(0) |= bit;
    }
    let mutual = pairs.values().filter(|&&m| m == 3).count() as u64;
    let asymmetric = pairs.len() as u64 - mutual;
    let n = p.node_count() as u64;
    let total = n * n.saturating_sub(1) / 2;
    DyadCensus {
        mutual,
        asymmetric,
        null: total - mutual - asymmetric,
    }
}

/// Sorted undirected simple adjacency (no duplicates, no self entries).
fn undirected_adjacency(g: &TxGraph) -> Vec<Vec<u32>> {
    let p = g.simple_projection(ProjectionMode::Undirected);
    let mut adj = vec![Vec::new(); p.node_count()];
    for a in p.arcs() {
        adj[a.source as usize].push(a.target);
        adj[a.target as usize].push(a.source);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Per-node triangle participation counts on sorted undirected adjacency.
fn triangle_counts(adj: &[Vec<u32>]) -> Vec<u64> {
    let mut counts = vec![0u64; adj.len()];
    for (u, neighbors) in adj.iter().enumerate() {
        for &v in neighbors {
            if (v as usize) <= u {
                continue;
            }
            // common neighbors w with u < v < w close a triangle exactly once
            let (mut i, mut j) = (0, 0);
            let nv = &adj[v as usize];
            while i < neighbors.len() && j < nv.len() {
                match neighbors[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = neighbors[i];
                        if w > v {
                            counts[u] += 1;
                            counts[v as usize] += 1;
                            counts[w as usize] += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Number of unordered node triples with all three edges present, on the
/// undirected simple projection.
pub fn triangle_count(g: &TxGraph) -> u64 {
    let adj = undirected_adjacency(g);
    triangle_counts(&adj).iter().sum::<u64>() / 3
}

/// `3 x triangles / connected triples`; 0 when there are no triples.
pub fn transitivity_global(g: &TxGraph) -> f64 {
    let adj = undirected_adjacency(g);
    let triangles: u64 = triangle_counts(&adj).iter().sum::<u64>() / 3;
    let triples: u64 = adj
        .iter()
        .map(|n| {
            let d = n.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        0.0
    } else {
        3.0 * triangles as f64 / triples as f64
    }
}

/// Mean local clustering over nodes with degree >= 2; 0 when no node
/// qualifies.
pub fn transitivity_avg_local(g: &TxGraph) -> f64 {
    let adj = undirected_adjacency(g);
    let counts = triangle_counts(&adj);
    let mut sum = 0.0;
    let mut eligible = 0u64;
    for (v, neighbors) in adj.iter().enumerate() {
        let d = neighbors.len() as u64;
        if d < 2 {
            continue;
        }
        eligible += 1;
        sum += counts[v] as f64 / (d * (d - 1) / 2) as f64;
    }
    if eligible == 0 {
        0.0
    } else {
        sum / eligible as f64
    }
}

/// Fraction of directed simple arcs whose reverse arc also exists.
pub fn reciprocity(g: &TxGraph) -> f64 {
    let p = g.simple_projection(ProjectionMode::Directed);
    if p.arc_count() == 0 {
        return 0.0;
    }
    let arcs: std::collections::HashSet<(u32, u32)> =
        p.arcs().iter().map(|a| (a.source, a.target)).collect();
    let reciprocated = arcs.iter().filter(|&&(u, v)| arcs.contains(&(v, u))).count();
    reciprocated as f64 / arcs.len() as f64
}

/// Exact shortest-path aggregates over all reachable ordered pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DistanceStats {
    /// Sum of shortest-path lengths over reachable ordered pairs (u, v), u != v.
    pub sum_hops: u64,
    /// Number of reachable ordered pairs.
    pub pairs: u64,
    /// Longest finite shortest path.
    pub max_hops: u64,
}

impl DistanceStats {
    fn merge(self, other: DistanceStats) -> DistanceStats {
        DistanceStats {
            sum_hops: self.sum_hops + other.sum_hops,
            pairs: self.pairs + other.pairs,
            max_hops: self.max_hops.max(other.max_hops),
        }
    }

    pub fn mean(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.sum_hops as f64 / self.pairs as f64)
    }
}

/// Compressed adjacency for BFS.
struct Csr {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(n: usize, arcs: impl Iterator<Item = (u32, u32)> + Clone) -> Csr {
        let mut offsets = vec![0u32; n + 1];
        for (s, _) in arcs.clone() {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n] as usize];
        for (s, t) in arcs {
            targets[cursor[s as usize] as usize] = t;
            cursor[s as usize] += 1;
        }
        Csr { offsets, targets }
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }
}

fn distance_csr(g: &TxGraph, mode: DistanceMode) -> Csr {
    match mode {
        DistanceMode::Directed => {
            let p = g.simple_projection(ProjectionMode::Directed);
            let arcs: Vec<(u32, u32)> = p.arcs().iter().map(|a| (a.source, a.target)).collect();
            Csr::build(p.node_count(), arcs.iter().copied())
        }
        DistanceMode::Undirected => {
            let p = g.simple_projection(ProjectionMode::Undirected);
            let arcs: Vec<(u32, u32)> = p
                .arcs()
                .iter()
                .flat_map(|a| [(a.source, a.target), (a.target, a.source)])
                .collect();
            Csr::build(p.node_count(), arcs.iter().copied())
        }
    }
}

/// Reusable per-thread BFS state.
struct BfsScratch {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl BfsScratch {
    fn new(n: usize) -> BfsScratch {
        BfsScratch {
            dist: vec![u32::MAX; n],
            queue: Vec::with_capacity(n),
        }
    }

    fn run(&mut self, csr: &Csr, source: u32) -> DistanceStats {
        let mut stats = DistanceStats::default();
        self.queue.clear();
        self.queue.push(source);
        self.dist[source as usize] = 0;
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            let d = self.dist[v as usize];
            for &w in csr.neighbors(v) {
                if self.dist[w as usize] == u32::MAX {
                    self.dist[w as usize] = d + 1;
                    self.queue.push(w);
                    stats.sum_hops += (d + 1) as u64;
                    stats.pairs += 1;
                    stats.max_hops = stats.max_hops.max((d + 1) as u64);
                }
            }
        }
        for &v in &self.queue {
            self.dist[v as usize] = u32::MAX;
        }
        stats
    }
}

/// Sequential reference implementation of the distance aggregates.
pub fn distance_stats_seq(g: &TxGraph, mode: DistanceMode) -> DistanceStats {
    let csr = distance_csr(g, mode);
    let n = g.node_count();
    let mut scratch = BfsScratch::new(n);
    let mut stats = DistanceStats::default();
    for s in 0..n as u32 {
        stats = stats.merge(scratch.run(&csr, s));
    }
    stats
}

/// Rayon fan-out over BFS sources; bit-identical to [`distance_stats_seq`].
#[cfg(feature = "parallel")]
pub fn distance_stats_par(g: &TxGraph, mode: DistanceMode) -> DistanceStats {
    use rayon::prelude::*;
    let csr = distance_csr(g, mode);
    let n = g.node_count();
    // chunky splits so each fold allocates its BFS scratch once
    (0..n as u32)
        .into_par_iter()
        .with_min_len(64)
        .fold(
            || (None::<BfsScratch>, DistanceStats::default()),
            |(scratch, stats), s| {
                let mut scratch = scratch.unwrap_or_else(|| BfsScratch::new(n));
                let run = scratch.run(&csr, s);
                (Some(scratch), stats.merge(run))
            },
        )
        .map(|(_, stats)| stats)
        .reduce(DistanceStats::default, DistanceStats::merge)
}

/// Shortest-path aggregates on the simple projection selected by `mode`.
pub fn distance_stats(g: &TxGraph, mode: DistanceMode) -> DistanceStats {
    #[cfg(feature = "parallel")]
    {
        distance_stats_par(g, mode)
    }
    #[cfg(not(feature = "parallel"))]
    {
        distance_stats_seq(g, mode)
    }
}

/// Average shortest-path length over reachable ordered pairs.
pub fn mean_distance(g: &TxGraph, mode: DistanceMode) -> Result<f64, MetricsError> {
    distance_stats(g, mode)
        .mean()
        .ok_or(MetricsError::NoReachablePairs)
}

/// Longest finite shortest path.
pub fn diameter(g: &TxGraph, mode: DistanceMode) -> Result<u64, MetricsError> {
    let stats = distance_stats(g, mode);
    if stats.pairs == 0 {
        return Err(MetricsError::NoReachablePairs);
    }
    Ok(stats.max_hops)
}

/// Enumerates all maximal cliques of size >= 2 on the undirected simple
/// projection (Bron-Kerbosch with pivoting). Cliques and their members are
/// sorted, so output order is deterministic.
pub fn maximal_cliques(g: &TxGraph, budget: u64) -> Result<Vec<Vec<u32>>, MetricsError> {
    let adj = undirected_adjacency(g);
    let mut out = Vec::new();
    let mut count = 0u64;
    let p: Vec<u32> = (0..g.node_count() as u32).collect();
    bron_kerbosch(&adj, &mut Vec::new(), p, Vec::new(), budget, &mut count, &mut out)?;
    out.retain(|c| c.len() >= 2);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    adj: &[Vec<u32>],
    r: &mut Vec<u32>,
    p: Vec<u32>,
    x: Vec<u32>,
    budget: u64,
    count: &mut u64,
    out: &mut Vec<Vec<u32>>,
) -> Result<(), MetricsError> {
    if p.is_empty() && x.is_empty() {
        *count += 1;
        if *count > budget {
            return Err(MetricsError::CliqueBudgetExceeded { budget });
        }
        out.push(r.clone());
        return Ok(());
    }
    // pivot on the highest-degree vertex of P union X
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&v| adj[v as usize].len())
        .unwrap();
    let pivot_neighbors = &adj[pivot as usize];
    let candidates: Vec<u32> = p
        .iter()
        .copied()
        .filter(|v| pivot_neighbors.binary_search(v).is_err())
        .collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let nv = &adj[v as usize];
        let next_p: Vec<u32> = p
            .iter()
            .copied()
            .filter(|w| nv.binary_search(w).is_ok())
            .collect();
        let next_x: Vec<u32> = x
            .iter()
            .copied()
            .filter(|w| nv.binary_search(w).is_ok())
            .collect();
        r.push(v);
        bron_kerbosch(adj, r, next_p, next_x, budget, count, out)?;
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
    Ok(())
}

/// Cardinality of the largest clique: 0 for the empty graph, 1 for an
/// edgeless graph, otherwise the longest enumerated maximal clique.
pub fn max_clique_size(g: &TxGraph) -> Result<u64, MetricsError> {
    if g.node_count() == 0 {
        return Ok(0);
    }
    let cliques = maximal_cliques(g, DEFAULT_CLIQUE_BUDGET)?;
    Ok(cliques.iter().map(|c| c.len() as u64).max().unwrap_or(1))
}

/// Assembles the full snapshot record. Deterministic for a fixed graph.
pub fn snapshot_report(
    g: &TxGraph,
    label: &str,
    mode: DistanceMode,
) -> Result<MetricsReport, MetricsError> {
    let nodes = g.node_count() as u64;
    let edges = g.arc_count() as u64;
    let stats = distance_stats(g, mode);
    let census = dyad_census(g);
    Ok(MetricsReport {
        snapshot_label: label.to_string(),
        generated_at_ms: g.arcs().iter().map(|a| a.timestamp_ms).max().unwrap_or(0),
        nodes,
        edges,
        diameter: (stats.pairs > 0).then_some(stats.max_hops),
        max_clique_size: max_clique_size(g)?,
        dyads_connected: census.connected(),
        triangles: triangle_count(g),
        reciprocity: (reciprocity(g) * 10_000.0).round() / 10_000.0,
        transitivity_global: transitivity_global(g),
        transitivity_avg_local: transitivity_avg_local(g),
        mean_degree: if nodes == 0 {
            0.0
        } else {
            mean_degree_from_counts(nodes, edges)
        },
        mean_distance: stats.mean(),
    })
}
