//! Discrete tail distributions on integer support `x >= xmin`.
//!
//! Every family is expressed through its conditional survival function
//! `S(x) = P(X >= x | X >= xmin)` with `S(xmin) = 1`:
//!
//! * power law: `S(x) = zeta(alpha, x) / zeta(alpha, xmin)` (exact zeta
//!   normalization);
//! * log-normal: continuity-corrected cells, `S(x) = Q(ln(x - 1/2)) /
//!   Q(ln(xmin - 1/2))` with `Q` the fitted normal survival;
//! * exponential on support shifted to `xmin`: `S(x) = exp(-lambda (x -
//!   xmin))`, i.e. a geometric tail;
//! * Poisson conditioned on `X >= xmin`.
//!
//! KS statistics, log-likelihoods and bootstrap resampling all run through
//! these survival functions, so the fitted model and its sampler can never
//! disagree.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::zeta::hurwitz_zeta;

/// Standard normal survival function.
fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone)]
pub(crate) enum TailDist {
    PowerLaw {
        alpha: f64,
        xmin: u64,
        /// `zeta(alpha, xmin)`, the tail normalizer.
        norm: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
        xmin: u64,
        /// `Q((ln(xmin - 0.5) - mu) / sigma)`, the tail normalizer.
        norm: f64,
    },
    Exponential {
        lambda: f64,
        xmin: u64,
    },
    Poisson {
        lambda: f64,
        xmin: u64,
        /// `P(X >= xmin)` under the unconditioned Poisson.
        norm: f64,
    },
}

impl TailDist {
    pub fn power_law(alpha: f64, xmin: u64) -> TailDist {
        TailDist::PowerLaw {
            alpha,
            xmin,
            norm: hurwitz_zeta(alpha, xmin as f64),
        }
    }

    pub fn log_normal(mu: f64, sigma: f64, xmin: u64) -> TailDist {
        TailDist::LogNormal {
            mu,
            sigma,
            xmin,
            norm: normal_sf(((xmin as f64 - 0.5).ln() - mu) / sigma),
        }
    }

    pub fn exponential(lambda: f64, xmin: u64) -> TailDist {
        TailDist::Exponential { lambda, xmin }
    }

    pub fn poisson(lambda: f64, xmin: u64) -> TailDist {
        TailDist::Poisson {
            lambda,
            xmin,
            norm: poisson_sf(lambda, xmin),
        }
    }

    pub fn xmin(&self) -> u64 {
        match *self {
            TailDist::PowerLaw { xmin, .. }
            | TailDist::LogNormal { xmin, .. }
            | TailDist::Exponential { xmin, .. }
            | TailDist::Poisson { xmin, .. } => xmin,
        }
    }

    /// `P(X >= x | X >= xmin)` for `x >= xmin`.
    pub fn survival(&self, x: u64) -> f64 {
        match *self {
            TailDist::PowerLaw { alpha, norm, .. } => hurwitz_zeta(alpha, x as f64) / norm,
            TailDist::LogNormal {
                mu, sigma, norm, ..
            } => normal_sf(((x as f64 - 0.5).ln() - mu) / sigma) / norm,
            TailDist::Exponential { lambda, xmin } => (-lambda * (x - xmin) as f64).exp(),
            TailDist::Poisson { lambda, norm, .. } => poisson_sf(lambda, x) / norm,
        }
    }

    /// `ln P(X = x | X >= xmin)`.
    pub fn log_pmf(&self, x: u64) -> f64 {
        match *self {
            // exact form avoids the cancellation of survival differences
            TailDist::PowerLaw { alpha, norm, .. } => -alpha * (x as f64).ln() - norm.ln(),
            _ => {
                let pmf = (self.survival(x) - self.survival(x + 1)).max(f64::MIN_POSITIVE);
                pmf.ln()
            }
        }
    }
}

/// `P(X >= x)` for an unconditioned Poisson, by direct tail summation.
fn poisson_sf(lambda: f64, x: u64) -> f64 {
    if x == 0 {
        return 1.0;
    }
    // first term in log space, then ratio updates
    let mut term = (-lambda + x as f64 * lambda.ln() - libm::lgamma(x as f64 + 1.0)).exp();
    let mut sum = term;
    let mut k = x;
    loop {
        k += 1;
        term *= lambda / k as f64;
        sum += term;
        if k as f64 > lambda && term < sum * 1e-17 {
            return sum.min(1.0);
        }
    }
}

/// Inverse-survival sampler with a precomputed table for the bulk and
/// doubling + bisection for the deep tail.
pub(crate) struct TailSampler {
    dist: TailDist,
    /// `survivals[i] = S(xmin + i)`; `survivals[0] = 1`.
    survivals: Vec<f64>,
}

const TABLE_LEN: usize = 4096;

impl TailSampler {
    pub fn new(dist: TailDist) -> TailSampler {
        let xmin = dist.xmin();
        let mut survivals = Vec::with_capacity(64);
        survivals.push(1.0);
        while survivals.len() < TABLE_LEN {
            let s = dist.survival(xmin + survivals.len() as u64);
            if s <= 0.0 {
                break;
            }
            survivals.push(s);
            if s < 1e-15 {
                break;
            }
        }
        TailSampler { dist, survivals }
    }

    /// Draws the largest `x` with `S(x) >= u`, `u` uniform on (0, 1].
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u = 1.0 - rng.random::<f64>();
        let xmin = self.dist.xmin();
        let last = *self.survivals.last().unwrap();
        if u > last || self.survivals.len() < TABLE_LEN {
            // within the table: first index with survival < u
            let i = self.survivals.partition_point(|&s| s >= u);
            return xmin + i as u64 - 1;
        }
        // beyond the table: S(lo) >= u, expand until S(hi) < u, then bisect
        let mut lo = xmin + self.survivals.len() as u64 - 1;
        let mut step = 1u64;
        let mut hi = lo + step;
        while self.dist.survival(hi) >= u {
            lo = hi;
            step *= 2;
            hi = lo + step;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.dist.survival(mid) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}
