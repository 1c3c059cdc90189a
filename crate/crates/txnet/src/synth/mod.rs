//! Seeded synthetic generators: preferential attachment, uniform random
//! graphs, and exact discrete power-law samples.
//!
//! All generators run on ChaCha8 streams keyed by the caller's seed, so equal
//! specs produce equal outputs on every platform. Generated graphs use
//! addresses `N0..N{n-1}`, 1 BTC per arc, and timestamps at 1 s spacing.

pub mod feed;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amount::Btc;
use crate::distfit::models::{TailDist, TailSampler};
use crate::graph::{GraphArc, TxGraph};

#[derive(Debug, thiserror::Error)]
#[error("invalid generator spec: {0}")]
pub struct InvalidSpec(pub String);

/// A generator invocation, serializable for run manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    PreferentialAttachment { n: u64, m: u64, seed: u64 },
    UniformRandom { n: u64, p: f64, seed: u64 },
    PowerLawSample { alpha: f64, xmin: u64, n: u64, seed: u64 },
}

fn synth_graph(n: u64, arcs: Vec<(u32, u32)>) -> TxGraph {
    let addresses: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let arcs = arcs
        .into_iter()
        .enumerate()
        .map(|(i, (source, target))| GraphArc {
            source,
            target,
            amount_btc: Btc::from_sat(100_000_000),
            timestamp_ms: i as u64 * 1000,
        })
        .collect();
    TxGraph::from_parts(addresses, arcs, true).expect("generator produces valid arcs")
}

/// Barabasi-Albert preferential attachment: a seed clique of `m + 1` nodes,
/// then each new node attaches `m` arcs to existing nodes with probability
/// proportional to current total degree (multi-edges resampled away).
/// `|E| = C(m+1, 2) + (n - m - 1) m`.
pub fn generate_pa(n: u64, m: u64, seed: u64) -> Result<TxGraph, InvalidSpec> {
    if m < 1 || n <= m {
        return Err(InvalidSpec(format!("need n > m >= 1, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(
        ((m + 1) * m / 2 + (n - m - 1) * m) as usize,
    );
    // each arc contributes both endpoints, giving degree-proportional draws
    let mut endpoints: Vec<u32> = Vec::new();
    for i in 0..=m as u32 {
        for j in i + 1..=m as u32 {
            arcs.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(m as usize);
    for v in (m + 1) as u32..n as u32 {
        chosen.clear();
        while chosen.len() < m as usize {
            let target = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &target in &chosen {
            arcs.push((v, target));
            endpoints.push(v);
            endpoints.push(target);
        }
    }
    Ok(synth_graph(n, arcs))
}

/// Uniform random graph: each unordered pair is present independently with
/// probability `p` (arcs oriented low id to high id). Pair space is walked
/// with geometric skips, so generation is `O(n + |E|)`.
pub fn generate_uniform(n: u64, p: f64, seed: u64) -> Result<TxGraph, InvalidSpec> {
    if n < 1 {
        return Err(InvalidSpec("need n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(InvalidSpec(format!("need p in [0, 1], got {p}")));
    }
    let total = n * (n - 1) / 2;
    let mut arcs = Vec::new();
    if p >= 1.0 {
        for i in 0..n as u32 {
            for j in i + 1..n as u32 {
                arcs.push((i, j));
            }
        }
        return Ok(synth_graph(n, arcs));
    }
    if p > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let log_q = (1.0 - p).ln();
        let mut pos: u64 = 0;
        loop {
            let u: f64 = rng.random();
            let skip = ((1.0 - u).ln() / log_q).floor();
            pos = pos.saturating_add(skip as u64);
            if pos >= total {
                break;
            }
            arcs.push(pair_from_index(n, pos));
            pos += 1;
        }
    }
    Ok(synth_graph(n, arcs))
}

/// Inverts the lexicographic pair index: `L = base(i) + (j - i - 1)` with
/// `base(i) = i(2n - i - 1)/2`.
fn pair_from_index(n: u64, index: u64) -> (u32, u32) {
    let base = |i: u64| i * (2 * n - i - 1) / 2;
    // quadratic estimate, then adjust for rounding
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * index as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as u64;
    i = i.min(n - 2);
    while i > 0 && base(i) > index {
        i -= 1;
    }
    while base(i + 1) <= index && i < n - 2 {
        i += 1;
    }
    let j = index - base(i) + i + 1;
    (i as u32, j as u32)
}

/// Draws `n` i.i.d. values from the discrete power law
/// `P(X = x) ~ x^-alpha`, `x >= xmin`, via inverse CDF on the exact
/// zeta-normalized mass function.
pub fn sample_power_law(alpha: f64, xmin: u64, n: u64, seed: u64) -> Result<Vec<u64>, InvalidSpec> {
    if alpha <= 1.0 {
        return Err(InvalidSpec(format!("need alpha > 1, got {alpha}")));
    }
    if xmin < 1 {
        return Err(InvalidSpec("need xmin >= 1".into()));
    }
    if n < 1 {
        return Err(InvalidSpec("need n >= 1".into()));
    }
    let sampler = TailSampler::new(TailDist::power_law(alpha, xmin));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
}
