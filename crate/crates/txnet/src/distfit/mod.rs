//! Degree-distribution fitting, goodness of fit, and growth curves.
//!
//! Power laws use the exact discrete maximum-likelihood exponent (numerical
//! maximization of the zeta-normalized likelihood); `xmin` can be fixed or
//! chosen by the KS-minimizing scan. Alternative families (log-normal,
//! exponential, Poisson) are fitted on the same tail so curves are
//! comparable. Goodness of fit is a semiparametric bootstrap: replicates
//! resample the below-`xmin` portion empirically, draw the tail from the
//! fitted model, refit at the same `xmin`, and the p-value is the fraction
//! of replicate KS statistics at or above the observed one. Every replicate
//! derives its own ChaCha stream from `(seed, replicate index)`, so p-values
//! are identical for any thread count.

pub(crate) mod models;

use serde::Serialize;

use crate::ledger::EdgeList;
use models::{TailDist, TailSampler};

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("input is empty")]
    EmptyInput,
    #[error("tail has {n_tail} observations, need at least 2")]
    InsufficientTail { n_tail: usize },
    #[error("tail observations are all equal; {family:?} fit is degenerate")]
    DegenerateData { family: Family },
    #[error("need at least 3 points, got {0}")]
    InsufficientPoints(usize),
    #[error("abscissa values must be positive")]
    NonPositiveAbscissa,
    #[error("all abscissa values are equal")]
    DegenerateAbscissa,
    #[error("xmin must be at least 1")]
    InvalidXmin,
    #[error("need at least 1 bootstrap replicate")]
    ZeroReplicates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PowerLaw,
    LogNormal,
    Exponential,
    Poisson,
}

/// Family-specific fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitParams {
    PowerLaw { alpha: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    Poisson { lambda: f64 },
}

/// A fitted degree-distribution model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFit {
    pub family: Family,
    pub params: FitParams,
    pub xmin: u64,
    /// Observations at or above `xmin`.
    pub n_tail: usize,
    /// Sup-norm gap between the empirical tail CDF and the model CDF.
    pub ks_stat: f64,
    pub log_likelihood: f64,
}

impl ModelFit {
    pub fn alpha(&self) -> Option<f64> {
        match self.params {
            FitParams::PowerLaw { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fit serializes");
        s.push('\n');
        s
    }

    fn dist(&self) -> TailDist {
        match self.params {
            FitParams::PowerLaw { alpha } => TailDist::power_law(alpha, self.xmin),
            FitParams::LogNormal { mu, sigma } => TailDist::log_normal(mu, sigma, self.xmin),
            FitParams::Exponential { lambda } => TailDist::exponential(lambda, self.xmin),
            FitParams::Poisson { lambda } => TailDist::poisson(lambda, self.xmin),
        }
    }
}

/// Bootstrap goodness-of-fit result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub p_value: f64,
    pub replicates: u64,
    pub seed: u64,
}

/// A fit with its optional goodness-of-fit result, as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDocument {
    pub fit: ModelFit,
    pub gof: Option<GofResult>,
}

impl FitDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fit serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XminMode {
    Fixed(u64),
    /// Scan candidate `xmin` values and keep the KS-minimizing one.
    Auto,
}

/// Sorted positive observations (zero degrees are excluded from fitting; the
/// log of zero is undefined).
fn sorted_positive(degrees: &[u64]) -> Vec<u64> {
    let mut xs: Vec<u64> = degrees.iter().copied().filter(|&x| x > 0).collect();
    xs.sort_unstable();
    xs
}

fn tail_of(sorted: &[u64], xmin: u64) -> &[u64] {
    let start = sorted.partition_point(|&x| x < xmin);
    &sorted[start..]
}

/// Exact sup-norm distance between the empirical CDF of `sorted_tail` and the
/// model CDF, over the integer support `x >= xmin`.
fn ks_statistic(sorted_tail: &[u64], dist: &TailDist) -> f64 {
    let n = sorted_tail.len() as f64;
    let model_cdf = |x: u64| 1.0 - dist.survival(x + 1);
    let mut d: f64 = 0.0;
    // before the first observation the empirical CDF is 0
    if sorted_tail[0] > dist.xmin() {
        d = model_cdf(sorted_tail[0] - 1);
    }
    let mut i = 0;
    while i < sorted_tail.len() {
        let v = sorted_tail[i];
        let mut j = i;
        while j < sorted_tail.len() && sorted_tail[j] == v {
            j += 1;
        }
        let f_emp = j as f64 / n;
        d = d.max((f_emp - model_cdf(v)).abs());
        // the empirical CDF is flat up to the next observation; the model CDF
        // is largest just before it
        if j < sorted_tail.len() && sorted_tail[j] > v + 1 {
            d = d.max((f_emp - model_cdf(sorted_tail[j] - 1)).abs());
        }
        i = j;
    }
    d
}

fn power_law_fit_at(sorted: &[u64], xmin: u64) -> Result<ModelFit, FitError> {
    let tail = tail_of(sorted, xmin);
    if tail.len() < 2 {
        return Err(FitError::InsufficientTail { n_tail: tail.len() });
    }
    // an all-equal tail pushes the zeta likelihood to its alpha -> inf limit
    if tail.first() == tail.last() {
        return Err(FitError::DegenerateData {
            family: Family::PowerLaw,
        });
    }
    let alpha = max_likelihood_alpha(tail, xmin);
    let dist = TailDist::power_law(alpha, xmin);
    let log_likelihood: f64 = tail.iter().map(|&x| dist.log_pmf(x)).sum();
    Ok(ModelFit {
        family: Family::PowerLaw,
        params: FitParams::PowerLaw { alpha },
        xmin,
        n_tail: tail.len(),
        ks_stat: ks_statistic(tail, &dist),
        log_likelihood,
    })
}

/// Exact discrete maximum-likelihood exponent: maximizes
/// `l(alpha) = -n ln zeta(alpha, xmin) - alpha sum(ln x)` by golden-section
/// search (the log-likelihood is strictly concave in alpha). The tail must
/// contain at least two distinct values, otherwise no finite maximizer
/// exists.
fn max_likelihood_alpha(tail: &[u64], xmin: u64) -> f64 {
    let mean_log: f64 = tail.iter().map(|&x| (x as f64).ln()).sum::<f64>() / tail.len() as f64;
    let ll = |alpha: f64| -crate::zeta::hurwitz_zeta(alpha, xmin as f64).ln() - alpha * mean_log;
    // bracket the peak: double until the likelihood stops increasing
    let mut hi = 2.0f64;
    let mut at_hi = ll(hi);
    loop {
        let next = ll(hi * 2.0);
        if next <= at_hi || hi > 1e9 {
            break;
        }
        hi *= 2.0;
        at_hi = next;
    }
    let mut a = 1.0 + 1e-9;
    let mut b = hi * 2.0;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut at_c, mut at_d) = (ll(c), ll(d));
    while b - a > 1e-11 * b.max(1.0) {
        if at_c > at_d {
            b = d;
            d = c;
            at_d = at_c;
            c = b - inv_phi * (b - a);
            at_c = ll(c);
        } else {
            a = c;
            c = d;
            at_c = at_d;
            d = a + inv_phi * (b - a);
            at_d = ll(d);
        }
    }
    (a + b) / 2.0
}

/// Fits the discrete power law `P(X = x) ~ x^-alpha`, `x >= xmin`, by exact
/// maximum likelihood on the zeta-normalized model. With `XminMode::Auto` the
/// candidate cutoffs (all distinct observed values) are scanned and the one
/// minimizing the KS statistic wins, ties to the smaller cutoff.
pub fn fit_power_law(degrees: &[u64], xmin: XminMode) -> Result<ModelFit, FitError> {
    let sorted = sorted_positive(degrees);
    if sorted.is_empty() {
        return Err(FitError::EmptyInput);
    }
    match xmin {
        XminMode::Fixed(0) => Err(FitError::InvalidXmin),
        XminMode::Fixed(xmin) => power_law_fit_at(&sorted, xmin),
        XminMode::Auto => {
            let mut candidates: Vec<u64> = sorted.clone();
            candidates.dedup();
            let mut best: Option<ModelFit> = None;
            let mut last_err = FitError::EmptyInput;
            for xmin in candidates {
                match power_law_fit_at(&sorted, xmin) {
                    Ok(fit) => {
                        if best.as_ref().is_none_or(|b| fit.ks_stat < b.ks_stat) {
                            best = Some(fit);
                        }
                    }
                    Err(e) => last_err = e,
                }
            }
            best.ok_or(last_err)
        }
    }
}

/// Fits one of the alternative families on the tail `x >= xmin`.
///
/// * log-normal: `mu`, `sigma` are the MLE mean and standard deviation of
///   `ln x` over the tail;
/// * exponential: `lambda = 1 / (mean - xmin + 1)` on support shifted to
///   `xmin`;
/// * Poisson: `lambda` is the tail mean.
pub fn fit_alternative(degrees: &[u64], family: Family, xmin: u64) -> Result<ModelFit, FitError> {
    if xmin == 0 {
        return Err(FitError::InvalidXmin);
    }
    let sorted = sorted_positive(degrees);
    if sorted.is_empty() {
        return Err(FitError::EmptyInput);
    }
    let tail = tail_of(&sorted, xmin);
    if tail.len() < 2 {
        return Err(FitError::InsufficientTail { n_tail: tail.len() });
    }
    let n = tail.len() as f64;
    let mean = tail.iter().map(|&x| x as f64).sum::<f64>() / n;
    let (params, dist) = match family {
        Family::PowerLaw => return fit_power_law(degrees, XminMode::Fixed(xmin)),
        Family::LogNormal => {
            let mu = tail.iter().map(|&x| (x as f64).ln()).sum::<f64>() / n;
            let var = tail
                .iter()
                .map(|&x| {
                    let d = (x as f64).ln() - mu;
                    d * d
                })
                .sum::<f64>()
                / n;
            if var == 0.0 {
                return Err(FitError::DegenerateData { family });
            }
            let sigma = var.sqrt();
            (
                FitParams::LogNormal { mu, sigma },
                TailDist::log_normal(mu, sigma, xmin),
            )
        }
        Family::Exponential => {
            let lambda = 1.0 / (mean - xmin as f64 + 1.0);
            (
                FitParams::Exponential { lambda },
                TailDist::exponential(lambda, xmin),
            )
        }
        Family::Poisson => (
            FitParams::Poisson { lambda: mean },
            TailDist::poisson(mean, xmin),
        ),
    };
    let log_likelihood: f64 = tail.iter().map(|&x| dist.log_pmf(x)).sum();
    Ok(ModelFit {
        family,
        params,
        xmin,
        n_tail: tail.len(),
        ks_stat: ks_statistic(tail, &dist),
        log_likelihood,
    })
}

fn refit_same_family(sample: &[u64], fit: &ModelFit) -> Result<ModelFit, FitError> {
    match fit.family {
        Family::PowerLaw => fit_power_law(sample, XminMode::Fixed(fit.xmin)),
        family => fit_alternative(sample, family, fit.xmin),
    }
}

fn bootstrap_replicate(
    r: u64,
    seed: u64,
    below: &[u64],
    n: usize,
    sampler: &TailSampler,
    fit: &ModelFit,
) -> f64 {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r + 1);
    let p_below = below.len() as f64 / n as f64;
    let sample: Vec<u64> = (0..n)
        .map(|_| {
            if !below.is_empty() && rng.random::<f64>() < p_below {
                below[rng.random_range(0..below.len())]
            } else {
                sampler.draw(&mut rng)
            }
        })
        .collect();
    // a replicate that cannot be refitted counts as maximally extreme
    refit_same_family(&sample, fit).map_or(f64::INFINITY, |f| f.ks_stat)
}

/// Semiparametric bootstrap goodness of fit; deterministic for a fixed seed,
/// independent of thread count.
pub fn gof_bootstrap(
    degrees: &[u64],
    fit: &ModelFit,
    replicates: u64,
    seed: u64,
) -> Result<GofResult, FitError> {
    #[cfg(feature = "parallel")]
    {
        gof_bootstrap_par(degrees, fit, replicates, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        gof_bootstrap_seq(degrees, fit, replicates, seed)
    }
}

fn bootstrap_parts(degrees: &[u64], fit: &ModelFit) -> (Vec<u64>, usize, TailSampler) {
    let sorted = sorted_positive(degrees);
    let below: Vec<u64> = sorted
        .iter()
        .copied()
        .filter(|&x| x < fit.xmin)
        .collect();
    (below, sorted.len(), TailSampler::new(fit.dist()))
}

/// Sequential reference implementation of [`gof_bootstrap`].
pub fn gof_bootstrap_seq(
    degrees: &[u64],
    fit: &ModelFit,
    replicates: u64,
    seed: u64,
) -> Result<GofResult, FitError> {
    if replicates == 0 {
        return Err(FitError::ZeroReplicates);
    }
    let (below, n, sampler) = bootstrap_parts(degrees, fit);
    let hits = (0..replicates)
        .filter(|&r| bootstrap_replicate(r, seed, &below, n, &sampler, fit) >= fit.ks_stat)
        .count();
    Ok(GofResult {
        p_value: hits as f64 / replicates as f64,
        replicates,
        seed,
    })
}

/// Rayon fan-out over replicates; bit-identical to [`gof_bootstrap_seq`].
#[cfg(feature = "parallel")]
pub fn gof_bootstrap_par(
    degrees: &[u64],
    fit: &ModelFit,
    replicates: u64,
    seed: u64,
) -> Result<GofResult, FitError> {
    use rayon::prelude::*;
    if replicates == 0 {
        return Err(FitError::ZeroReplicates);
    }
    let (below, n, sampler) = bootstrap_parts(degrees, fit);
    let hits = (0..replicates)
        .into_par_iter()
        .filter(|&r| bootstrap_replicate(r, seed, &below, n, &sampler, fit) >= fit.ks_stat)
        .count();
    Ok(GofResult {
        p_value: hits as f64 / replicates as f64,
        replicates,
        seed,
    })
}

/// Complementary cumulative distribution of a degree sample: one point per
/// distinct degree, `P(X >= degree)`, starting at probability 1.
pub fn ccdf_series(degrees: &[u64]) -> Result<Vec<(u64, f64)>, FitError> {
    if degrees.is_empty() {
        return Err(FitError::EmptyInput);
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut series = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        series.push((v, (sorted.len() - i) as f64 / n));
        while i < sorted.len() && sorted[i] == v {
            i += 1;
        }
    }
    Ok(series)
}

/// One cumulative growth observation at the end of a time bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    /// Seconds since the window start, at the bin's end.
    pub t_s: u64,
    pub cumulative_nodes: u64,
    pub cumulative_edges: u64,
}

/// Per-bin cumulative counts of distinct addresses and edges. Bins cover the
/// whole window `[t0, t0 + duration)`; both series are non-decreasing.
pub fn growth_series(edges: &EdgeList, bin_s: u64) -> Vec<GrowthPoint> {
    assert!(bin_s > 0, "bin must be positive");
    if edges.is_empty() {
        return Vec::new();
    }
    let bin_ms = bin_s * 1000;
    let t0 = edges.t0_ms();
    let bins = edges.duration_ms().div_ceil(bin_ms).max(1);
    let mut series = Vec::with_capacity(bins as usize);
    let mut seen: std::collections::HashSet<&str> = std::collections::HashSet::new();
    let mut idx = 0usize;
    let mut cumulative_edges = 0u64;
    let all = edges.edges();
    for b in 0..bins {
        let end = t0 + (b + 1) * bin_ms;
        while idx < all.len() && all[idx].timestamp_ms < end {
            seen.insert(&all[idx].source);
            seen.insert(&all[idx].target);
            cumulative_edges += 1;
            idx += 1;
        }
        series.push(GrowthPoint {
            t_s: (b + 1) * bin_s,
            cumulative_nodes: seen.len() as u64,
            cumulative_edges,
        });
    }
    series
}

/// Least-squares fit of `y = a + b ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

impl GrowthFit {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fit serializes");
        s.push('\n');
        s
    }
}

/// Fits `y = a + b ln t` by least squares. Constant `y` returns the
/// documented degenerate convention `b = 0`, `r_squared = 0`.
pub fn fit_log_growth(series: &[(f64, f64)]) -> Result<GrowthFit, FitError> {
    if series.len() < 3 {
        return Err(FitError::InsufficientPoints(series.len()));
    }
    if series.iter().any(|&(t, _)| t <= 0.0) {
        return Err(FitError::NonPositiveAbscissa);
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|&(t, _)| t.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = series.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &(_, y)) in xs.iter().zip(series) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
        syy += (y - y_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    if syy == 0.0 {
        return Ok(GrowthFit {
            intercept: y_mean,
            slope: 0.0,
            r_squared: 0.0,
        });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let mut ss_res = 0.0;
    for (&x, &(_, y)) in xs.iter().zip(series) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    Ok(GrowthFit {
        intercept,
        slope,
        r_squared: 1.0 - ss_res / syy,
    })
}
