//! Monte Carlo estimation of the valuation `λ_i[v]` via random orderings.
//!
//! One uniformly random ordering of the features yields, for the feature at
//! 0-based position `p`, the weighted sequential increment
//! `(n-p)/(n+1) · [v(prefix ∪ {i}) - v(prefix)]`. Its expectation over
//! orderings is exactly `λ_i[v]`, so the sample mean and its standard error
//! drive a two-sided z-test of zero valuation. A single ordering traversal
//! evaluates `v` exactly `n+1` times and updates all `n` features at once.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{CoalitionValue, FeatureSet, KahanSum};
use crate::{Error, Result};

/// Orderings per chunk; chunks run in parallel but merge in index order, so
/// results do not depend on the thread count.
const CHUNK: usize = 64;

/// Sampling parameters for [`estimate`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OrderingSampleConfig {
    /// Ordering sample size γ. The method is intended for γ >= 100; any
    /// γ >= 2 is accepted.
    pub gamma: usize,
    pub seed: u64,
    /// Two-sided significance level for the zero-valuation test.
    pub alpha: f64,
}

impl OrderingSampleConfig {
    pub fn new(gamma: usize, seed: u64, alpha: f64) -> Self {
        OrderingSampleConfig { gamma, seed, alpha }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma < 2 {
            return Err(Error::Config(format!(
                "ordering sample size must be >= 2, got {}",
                self.gamma
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "significance level must be in (0,1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Per-feature estimate of `λ_i[v]` with its standard error and z statistic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValuationEstimate {
    pub lambda_hat: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub z: Vec<f64>,
    pub samples: usize,
}

/// A uniformly random ordering of `0..n` (Fisher–Yates).
pub fn sample_ordering(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Weighted sequential increments of one ordering: entry `i` holds
/// `(n-p)/(n+1) · [v(Ξ ∪ {i}) - v(Ξ)]` where `Ξ` is `i`'s prefix and `p`
/// its position. Evaluates `v` exactly `n+1` times.
pub fn weighted_increments(game: &impl CoalitionValue, tau: &[usize]) -> Result<Vec<f64>> {
    let n = game.n();
    if tau.len() != n {
        return Err(Error::Domain(format!(
            "ordering has {} entries, game has {n} features",
            tau.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in tau {
        if i >= n || seen[i] {
            return Err(Error::Domain("not a permutation of 0..n".into()));
        }
        seen[i] = true;
    }

    let mut out = vec![0.0; n];
    let mut prefix = FeatureSet::empty(n)?;
    let mut v_prev = game.value(prefix);
    for (pos, &i) in tau.iter().enumerate() {
        let next = prefix.with(i);
        let v_next = game.value(next);
        let weight = (n - pos) as f64 / (n + 1) as f64;
        out[i] = weight * (v_next - v_prev);
        prefix = next;
        v_prev = v_next;
    }
    Ok(out)
}

fn ordering_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Estimates all `λ_i[v]` simultaneously from `γ` random orderings.
///
/// Ordering `k` draws from an RNG stream derived from `(seed, k)`, so the
/// estimate is reproducible under any parallel schedule.
pub fn estimate(game: &impl CoalitionValue, cfg: &OrderingSampleConfig) -> Result<ValuationEstimate> {
    cfg.validate()?;
    let n = game.n();
    let gamma = cfg.gamma;

    let n_chunks = gamma.div_ceil(CHUNK);
    let chunks: Vec<(Vec<KahanSum>, Vec<KahanSum>)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(gamma);
            let mut sum = vec![KahanSum::default(); n];
            let mut sum_sq = vec![KahanSum::default(); n];
            for k in lo..hi {
                let mut rng = ordering_rng(cfg.seed, k);
                let tau = sample_ordering(&mut rng, n);
                let inc = weighted_increments(game, &tau).expect("tau is a permutation");
                for i in 0..n {
                    sum[i].add(inc[i]);
                    sum_sq[i].add(inc[i] * inc[i]);
                }
            }
            (sum, sum_sq)
        })
        .collect();

    // Merge in chunk order for determinism.
    let mut sum = vec![KahanSum::default(); n];
    let mut sum_sq = vec![KahanSum::default(); n];
    for (s, sq) in &chunks {
        for i in 0..n {
            sum[i].add(s[i].value());
            sum_sq[i].add(sq[i].value());
        }
    }

    let g = gamma as f64;
    let mut lambda_hat = Vec::with_capacity(n);
    let mut sigma_hat = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        let mean = sum[i].value() / g;
        let mean_sq = sum_sq[i].value() / g;
        // Rounding can push the variance slightly negative; clamp.
        let var = (mean_sq - mean * mean).max(0.0);
        let sigma = (var / g).sqrt();
        lambda_hat.push(mean);
        sigma_hat.push(sigma);
        z.push(if sigma == 0.0 {
            if mean == 0.0 {
                0.0
            } else {
                mean.signum() * f64::INFINITY
            }
        } else {
            mean / sigma
        });
    }

    Ok(ValuationEstimate {
        lambda_hat,
        sigma_hat,
        z,
        samples: gamma,
    })
}

/// Per-feature relevance decisions: relevant iff `|z_i| >= z_{1-α/2}`.
pub fn decide(est: &ValuationEstimate, alpha: f64) -> Result<Vec<bool>> {
    let crit = normal_quantile(1.0 - alpha / 2.0)?;
    Ok(est.z.iter().map(|&z| z.abs() >= crit).collect())
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9 over (0,1)).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile probability must be in (0,1), got {p}")));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    Ok(x)
}
