//! Simulation study harness: synthetic regression data with a known true
//! feature set, baseline selectors, and discrepancy tallies.
//!
//! A trial draws correlated, non-normal candidate features, builds `y` from
//! the first `true_size` of them plus noise scaled to a target population
//! R², runs the configured selection method, and classifies the estimate
//! against the truth (exact, under-fit by 1 / 2+, over-fit by 1 / 2+).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::game::FeatureSet;
use crate::linmodel::{ols_fit, Dataset, PayoffSpec, RSS_EXACT_REL_TOL};
use crate::mc::OrderingSampleConfig;
use crate::seed::mix_seed;
use crate::selector::sequential_select;
use crate::{Error, Result};

/// Criterion value reported for an exactly-fitting subset; all perfect fits
/// tie here and the smaller subset wins the tie-break.
pub const CRITERION_FLOOR: f64 = -1.0e300;

/// Selection method run on each simulated trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    /// Sequential acceptance driven by the valuation z-test.
    Lambda { payoff: PayoffSpec },
    Stepwise { p_enter: f64, p_remove: f64 },
    #[serde(rename = "aic")]
    BestSubsetAic,
    #[serde(rename = "bic")]
    BestSubsetBic,
    /// Returns the true set; a stub for exercising the tally plumbing.
    Oracle,
}

/// Information criterion for exhaustive best-subset search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Bic,
}

/// Full configuration of a simulation study.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub true_size: usize,
    pub t_obs: usize,
    pub trials: usize,
    pub seed: u64,
    pub method: Method,
    pub gamma: usize,
    pub alpha: f64,
    pub coef_low: f64,
    pub coef_high: f64,
    pub noise_r2_target: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.true_size == 0 || self.true_size > self.n {
            return Err(Error::Config(format!(
                "true_size must be in 1..={}, got {}",
                self.n, self.true_size
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.noise_r2_target > 0.0 && self.noise_r2_target < 1.0) {
            return Err(Error::Config(format!(
                "noise_r2_target must be in (0,1), got {}",
                self.noise_r2_target
            )));
        }
        if !(self.coef_low > 0.0 && self.coef_low <= self.coef_high) {
            return Err(Error::Config(format!(
                "coefficient band [{}, {}] is invalid",
                self.coef_low, self.coef_high
            )));
        }
        Ok(())
    }

    /// Benchmark-study defaults; `method` still has to be chosen.
    pub fn defaults(method: Method) -> Self {
        SimConfig {
            n: 20,
            true_size: 4,
            t_obs: 100,
            trials: 200,
            seed: 0,
            method,
            gamma: 100,
            alpha: 0.05,
            coef_low: 0.5,
            coef_high: 3.0,
            noise_r2_target: 0.7,
        }
    }
}

/// Outcome counts across trials, one counter per discrepancy row.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyTally {
    /// Ŝ = S.
    pub exact: usize,
    /// |S \ Ŝ| = 1.
    pub under1: usize,
    /// |S \ Ŝ| >= 2.
    pub under2plus: usize,
    /// |Ŝ \ S| = 1.
    pub over1: usize,
    /// |Ŝ \ S| >= 2.
    pub over2plus: usize,
    /// Trials whose method errored; excluded from the other counters.
    pub failures: usize,
    pub trials: usize,
}

impl DiscrepancyTally {
    pub fn record(&mut self, d: &Discrepancy) {
        self.trials += 1;
        if d.exact {
            self.exact += 1;
        }
        match d.under {
            0 => {}
            1 => self.under1 += 1,
            _ => self.under2plus += 1,
        }
        match d.over {
            0 => {}
            1 => self.over1 += 1,
            _ => self.over2plus += 1,
        }
    }

    pub fn record_failure(&mut self) {
        self.trials += 1;
        self.failures += 1;
    }

    /// CSV summary with one row per discrepancy category.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("discrepancy,count\n");
        s.push_str(&format!("Shat=S,{}\n", self.exact));
        s.push_str(&format!("|S-Shat|=1,{}\n", self.under1));
        s.push_str(&format!("|S-Shat|>=2,{}\n", self.under2plus));
        s.push_str(&format!("|Shat-S|=1,{}\n", self.over1));
        s.push_str(&format!("|Shat-S|>=2,{}\n", self.over2plus));
        s.push_str(&format!("failures,{}\n", self.failures));
        s
    }
}

/// Per-trial set discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub under: usize,
    pub over: usize,
    pub exact: bool,
}

/// Compares an estimated set against the truth.
pub fn classify(s_hat: &FeatureSet, s_true: &FeatureSet) -> Discrepancy {
    let under = s_true.difference(s_hat).len();
    let over = s_hat.difference(s_true).len();
    Discrepancy {
        under,
        over,
        exact: under == 0 && over == 0,
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Generates one synthetic trial: correlated non-normal candidates, true
/// coefficients on the first `true_size` features, noise scaled to the
/// target population R². Returns the dataset and the true set.
pub fn generate_dataset(cfg: &SimConfig, trial: usize) -> Result<(Dataset, FeatureSet)> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let n = cfg.n;
    let t_obs = cfg.t_obs;

    // Independent draws, then a random mixing matrix for dependence.
    let raw: Vec<Vec<f64>> = (0..t_obs)
        .map(|_| (0..n).map(|_| standard_normal(&mut rng)).collect())
        .collect();
    let mixing: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| standard_normal(&mut rng)).collect())
        .collect();

    // One nonlinear transform for the whole dataset, clipped to stay finite.
    let transform_idx = rng.random_range(0..4u8);
    let transform = |x: f64| -> f64 {
        match transform_idx {
            0 => x.clamp(-20.0, 20.0).exp(),
            1 => x * x,
            2 => x * x * x,
            _ => x.abs().max(1e-8).ln(),
        }
    };

    let mut x_cols: Vec<Vec<f64>> = vec![vec![0.0; t_obs]; n];
    for r in 0..t_obs {
        for c in 0..n {
            let mut v = 0.0;
            for k in 0..n {
                v += raw[r][k] * mixing[k][c];
            }
            x_cols[c][r] = transform(v);
        }
    }

    // Standardize columns so no transform dominates the conditioning.
    for col in x_cols.iter_mut() {
        let mean = col.iter().sum::<f64>() / t_obs as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t_obs as f64;
        let sd = var.sqrt().max(1e-12);
        for v in col.iter_mut() {
            *v = (*v - mean) / sd;
        }
    }

    // True coefficients: magnitude in [coef_low, coef_high], random sign.
    let betas: Vec<f64> = (0..cfg.true_size)
        .map(|_| {
            let mag = cfg.coef_low + (cfg.coef_high - cfg.coef_low) * rng.random::<f64>();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();

    let signal: Vec<f64> = (0..t_obs)
        .map(|r| (0..cfg.true_size).map(|i| betas[i] * x_cols[i][r]).sum())
        .collect();
    let sig_mean = signal.iter().sum::<f64>() / t_obs as f64;
    let sig_var = signal
        .iter()
        .map(|v| (v - sig_mean) * (v - sig_mean))
        .sum::<f64>()
        / t_obs as f64;
    // Var(ε) chosen so the population R² hits the target.
    let r2 = cfg.noise_r2_target;
    let noise_sd = (sig_var.max(1e-12) * (1.0 - r2) / r2).sqrt();

    let y: Vec<f64> = (0..t_obs)
        .map(|r| 1.0 + signal[r] + noise_sd * standard_normal(&mut rng))
        .collect();

    let data = Dataset::new(y, x_cols, vec![])?;
    let s_true = FeatureSet::from_indices(&(0..cfg.true_size).collect::<Vec<_>>(), n)?;
    Ok((data, s_true))
}

fn partial_f_pvalue(rss_small: f64, rss_big: f64, t_obs: usize, k_big: usize) -> f64 {
    if t_obs <= k_big {
        return 1.0;
    }
    let df2 = (t_obs - k_big) as f64;
    if rss_big <= f64::EPSILON * rss_small.max(1.0) {
        return 0.0;
    }
    let f = ((rss_small - rss_big).max(0.0)) / (rss_big / df2);
    let dist = FisherSnedecor::new(1.0, df2).expect("valid dfs");
    1.0 - dist.cdf(f)
}

/// Classic forward/backward stepwise selection on partial-F p-values.
pub fn stepwise_baseline(data: &Dataset, p_enter: f64, p_remove: f64) -> Result<FeatureSet> {
    if !(p_enter > 0.0 && p_enter <= p_remove && p_remove < 1.0) {
        return Err(Error::Config(format!(
            "stepwise thresholds need 0 < p_enter <= p_remove < 1, got {p_enter}, {p_remove}"
        )));
    }
    let n = data.n_candidates();
    let t_obs = data.n_obs();
    let mut current = FeatureSet::empty(n)?;
    let mut visited = std::collections::HashSet::new();
    visited.insert(current.bits());

    loop {
        let mut changed = false;
        let rss_cur = ols_fit(data, current)?.rss;

        // Forward: add the candidate with the smallest entering p-value.
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if current.contains(j) {
                continue;
            }
            let fit = ols_fit(data, current.with(j))?;
            let p = partial_f_pvalue(rss_cur, fit.rss, t_obs, fit.k);
            if best.map_or(true, |(bp, _)| p < bp) {
                best = Some((p, j));
            }
        }
        if let Some((p, j)) = best {
            if p < p_enter {
                current = current.with(j);
                changed = true;
            }
        }

        // Backward: drop the included feature with the largest p-value.
        let rss_now = ols_fit(data, current)?.rss;
        let k_now = ols_fit(data, current)?.k;
        let mut worst: Option<(f64, usize)> = None;
        for j in current.indices() {
            let fit_without = ols_fit(data, current.without(j))?;
            let p = partial_f_pvalue(fit_without.rss, rss_now, t_obs, k_now);
            if worst.map_or(true, |(wp, _)| p > wp) {
                worst = Some((p, j));
            }
        }
        if let Some((p, j)) = worst {
            if p > p_remove {
                current = current.without(j);
                changed = true;
            }
        }

        if !changed {
            return Ok(current);
        }
        // Cycle guard: a revisited state would loop forever.
        if !visited.insert(current.bits()) {
            return Ok(current);
        }
    }
}

fn ic_value(rss: f64, tss: f64, t_obs: usize, k: usize, criterion: Criterion) -> f64 {
    if rss <= RSS_EXACT_REL_TOL * tss {
        return CRITERION_FLOOR;
    }
    let t = t_obs as f64;
    let penalty = match criterion {
        Criterion::Aic => 2.0 * k as f64,
        Criterion::Bic => k as f64 * t.ln(),
    };
    t * (rss / t).ln() + penalty
}

/// Exhaustive best-subset search over all `2^n` coalitions.
///
/// Ties (within 1e-9 relative) break toward the smaller subset, then the
/// lower bitmask.
pub fn best_subset_ic(data: &Dataset, criterion: Criterion) -> Result<FeatureSet> {
    let n = data.n_candidates();
    if n > 20 {
        return Err(Error::Capacity {
            op: "best_subset_ic",
            n,
            limit: 20,
            cost: "2^n",
        });
    }
    let mut best: Option<(f64, usize, u64)> = None;
    for bits in 0..1u64 << n {
        let t = FeatureSet::from_bits(bits, n)?;
        let fit = ols_fit(data, t)?;
        let c = ic_value(fit.rss, fit.tss, data.n_obs(), fit.k, criterion);
        let k = t.len();
        let better = match best {
            None => true,
            Some((bc, bk, bb)) => {
                let tol = 1e-9 * bc.abs().max(1.0);
                if c < bc - tol {
                    true
                } else if (c - bc).abs() <= tol {
                    k < bk || (k == bk && bits < bb)
                } else {
                    false
                }
            }
        };
        if better {
            best = Some((c, k, bits));
        }
    }
    let (_, _, bits) = best.expect("at least the empty subset was scored");
    FeatureSet::from_bits(bits, n)
}

/// One trial's outcome in a study.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub s_true: Vec<usize>,
    pub s_hat: Vec<usize>,
    pub under: usize,
    pub over: usize,
    pub error: Option<String>,
}

/// A completed study: configuration, tally, and per-trial records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: SimConfig,
    pub tally: DiscrepancyTally,
    pub per_trial: Vec<TrialRecord>,
}

fn run_trial(cfg: &SimConfig, trial: usize) -> Result<(FeatureSet, FeatureSet)> {
    let (data, s_true) = generate_dataset(cfg, trial)?;
    let s_hat = match &cfg.method {
        Method::Lambda { payoff } => {
            let sel_seed = mix_seed(cfg.seed ^ 0x5E1E_C710_u64, trial as u64);
            let mc_cfg = OrderingSampleConfig::new(cfg.gamma, sel_seed, cfg.alpha);
            let report = sequential_select(&data, payoff, &mc_cfg)?;
            report.accepted_set(cfg.n)?
        }
        Method::Stepwise { p_enter, p_remove } => stepwise_baseline(&data, *p_enter, *p_remove)?,
        Method::BestSubsetAic => best_subset_ic(&data, Criterion::Aic)?,
        Method::BestSubsetBic => best_subset_ic(&data, Criterion::Bic)?,
        Method::Oracle => s_true,
    };
    Ok((s_hat, s_true))
}

/// Runs every trial, classifies, and tallies. Trials run in parallel; the
/// tally is merged in trial order, and per-trial failures are recorded
/// rather than dropped.
pub fn run_study(cfg: &SimConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let outcomes: Vec<(usize, Result<(FeatureSet, FeatureSet)>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| (trial, run_trial(cfg, trial)))
        .collect();

    let mut tally = DiscrepancyTally::default();
    let mut per_trial = Vec::with_capacity(cfg.trials);
    for (trial, outcome) in outcomes {
        match outcome {
            Ok((s_hat, s_true)) => {
                let d = classify(&s_hat, &s_true);
                tally.record(&d);
                per_trial.push(TrialRecord {
                    trial,
                    s_true: s_true.indices(),
                    s_hat: s_hat.indices(),
                    under: d.under,
                    over: d.over,
                    error: None,
                });
            }
            Err(e) => {
                tally.record_failure();
                per_trial.push(TrialRecord {
                    trial,
                    s_true: vec![],
                    s_hat: vec![],
                    under: 0,
                    over: 0,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    Ok(StudyResult {
        config: cfg.clone(),
        tally,
        per_trial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::PayoffKind;

    fn small_cfg(method: Method) -> SimConfig {
        SimConfig {
            n: 6,
            true_size: 2,
            t_obs: 80,
            trials: 10,
            seed: 42,
            method,
            gamma: 100,
            alpha: 0.05,
            coef_low: 0.5,
            coef_high: 3.0,
            noise_r2_target: 0.7,
        }
    }

    #[test]
    fn classify_cases() {
        let n = 5;
        let s = FeatureSet::from_indices(&[0, 1], n).unwrap();
        let same = classify(&s, &s);
        assert!(same.exact);
        let hat = FeatureSet::from_indices(&[0], n).unwrap();
        let d = classify(&hat, &s);
        assert_eq!((d.under, d.over, d.exact), (1, 0, false));
        let hat = FeatureSet::from_indices(&[1, 2, 3], n).unwrap();
        let d = classify(&hat, &s);
        assert_eq!((d.under, d.over), (1, 2));
    }

    fn columns_of(data: &Dataset) -> Vec<Vec<f64>> {
        let x = data.x_matrix();
        (0..x.ncols())
            .map(|c| (0..x.nrows()).map(|r| x[(r, c)]).collect())
            .collect()
    }

    fn mean_abs_corr(cols: &[Vec<f64>]) -> f64 {
        let n = cols.len();
        let t = cols[0].len() as f64;
        let mut total = 0.0;
        let mut count = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                let ma = cols[a].iter().sum::<f64>() / t;
                let mb = cols[b].iter().sum::<f64>() / t;
                let mut num = 0.0;
                let mut va = 0.0;
                let mut vb = 0.0;
                for r in 0..cols[a].len() {
                    num += (cols[a][r] - ma) * (cols[b][r] - mb);
                    va += (cols[a][r] - ma).powi(2);
                    vb += (cols[b][r] - mb).powi(2);
                }
                total += (num / (va.sqrt() * vb.sqrt())).abs();
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn generated_data_is_trial_deterministic() {
        let cfg = small_cfg(Method::Oracle);
        let (a, _) = generate_dataset(&cfg, 3).unwrap();
        let (b, _) = generate_dataset(&cfg, 3).unwrap();
        assert_eq!(a.x_matrix(), b.x_matrix());
        let (c, _) = generate_dataset(&cfg, 4).unwrap();
        assert_ne!(a.x_matrix(), c.x_matrix());
    }

    #[test]
    fn mixing_induces_column_dependence() {
        // Average |off-diagonal correlation| after mixing should beat that
        // of an unmixed draw of the same shape.
        let cfg = SimConfig {
            n: 8,
            t_obs: 300,
            ..small_cfg(Method::Oracle)
        };
        let (data, _) = generate_dataset(&cfg, 0).unwrap();
        let mut rng = trial_rng(cfg.seed, 999);
        let unmixed: Vec<Vec<f64>> = (0..cfg.n)
            .map(|_| (0..cfg.t_obs).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        assert!(mean_abs_corr(&columns_of(&data)) > mean_abs_corr(&unmixed));
    }

    #[test]
    fn oracle_stub_tallies_exact() {
        let mut cfg = small_cfg(Method::Oracle);
        cfg.trials = 1;
        let study = run_study(&cfg).unwrap();
        assert_eq!(study.tally.exact, 1);
        assert_eq!(study.tally.trials, 1);
    }

    #[test]
    fn tally_conservation() {
        let cfg = small_cfg(Method::Lambda {
            payoff: PayoffSpec::new(PayoffKind::Ar2),
        });
        let study = run_study(&cfg).unwrap();
        let imperfect = study
            .per_trial
            .iter()
            .filter(|t| t.error.is_none() && (t.under > 0 || t.over > 0))
            .count();
        assert_eq!(
            study.tally.exact + imperfect + study.tally.failures,
            cfg.trials
        );
    }

    #[test]
    fn study_is_reproducible() {
        let cfg = small_cfg(Method::Lambda {
            payoff: PayoffSpec::new(PayoffKind::R2),
        });
        let a = run_study(&cfg).unwrap();
        let b = run_study(&cfg).unwrap();
        assert_eq!(a.tally, b.tally);
        for (x, y) in a.per_trial.iter().zip(&b.per_trial) {
            assert_eq!(x.s_hat, y.s_hat);
        }
    }

    #[test]
    fn dgp_independent_of_method() {
        let a = run_study(&small_cfg(Method::Oracle)).unwrap();
        let b = run_study(&small_cfg(Method::BestSubsetBic)).unwrap();
        for (x, y) in a.per_trial.iter().zip(&b.per_trial) {
            assert_eq!(x.s_true, y.s_true);
        }
    }

    #[test]
    fn stepwise_finds_strong_signal() {
        let cfg = small_cfg(Method::Oracle);
        let mut exact = 0;
        for trial in 0..10 {
            let (data, s_true) = generate_dataset(&cfg, trial).unwrap();
            let s_hat = stepwise_baseline(&data, 0.05, 0.10).unwrap();
            if s_hat.difference(&s_true).is_empty() && s_true.difference(&s_hat).is_empty() {
                exact += 1;
            }
            assert!(s_hat.len() <= cfg.n);
        }
        assert!(exact >= 5, "stepwise exact on {exact}/10 easy trials");
    }

    #[test]
    fn best_subset_matches_brute_force_reenumeration() {
        let cfg = small_cfg(Method::Oracle);
        let (data, _) = generate_dataset(&cfg, 1).unwrap();
        let chosen = best_subset_ic(&data, Criterion::Bic).unwrap();
        // Second, independent pass.
        let mut best_bits = 0u64;
        let mut best_c = f64::INFINITY;
        for bits in 0..1u64 << cfg.n {
            let t = FeatureSet::from_bits(bits, cfg.n).unwrap();
            let fit = ols_fit(&data, t).unwrap();
            let c = ic_value(fit.rss, fit.tss, cfg.t_obs, fit.k, Criterion::Bic);
            if c < best_c {
                best_c = c;
                best_bits = bits;
            }
        }
        assert_eq!(chosen.bits(), best_bits);
    }

    #[test]
    fn best_subset_zero_noise_tie_breaks_to_true_set() {
        // y exactly linear in {0,1}: every superset fits exactly; the
        // saturation floor plus the size tie-break recovers {0,1}.
        let cfg = small_cfg(Method::Oracle);
        let (data, _) = generate_dataset(&cfg, 2).unwrap();
        let x = data.x_matrix();
        let y: Vec<f64> = (0..cfg.t_obs)
            .map(|r| 1.0 + 2.0 * x[(r, 0)] - 3.0 * x[(r, 1)])
            .collect();
        let x_cols: Vec<Vec<f64>> = (0..cfg.n)
            .map(|c| (0..cfg.t_obs).map(|r| x[(r, c)]).collect())
            .collect();
        let exact_data = Dataset::new(y, x_cols, vec![]).unwrap();
        let chosen = best_subset_ic(&exact_data, Criterion::Bic).unwrap();
        assert_eq!(chosen.indices(), vec![0, 1]);
    }

    #[test]
    fn bic_prefers_empty_model_on_pure_noise() {
        let mut hits = 0;
        for trial in 0..10 {
            let mut rng = trial_rng(7, trial);
            let t_obs = 500;
            let x_cols: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..t_obs).map(|_| standard_normal(&mut rng)).collect())
                .collect();
            let y: Vec<f64> = (0..t_obs).map(|_| standard_normal(&mut rng)).collect();
            let data = Dataset::new(y, x_cols, vec![]).unwrap();
            if best_subset_ic(&data, Criterion::Bic).unwrap().is_empty() {
                hits += 1;
            }
        }
        assert!(hits >= 8, "empty model chosen in {hits}/10 noise trials");
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(Method::Oracle);
        cfg.true_size = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_cfg(Method::Oracle);
        cfg.noise_r2_target = 1.0;
        assert!(cfg.validate().is_err());
        assert!(stepwise_baseline(
            &generate_dataset(&small_cfg(Method::Oracle), 0).unwrap().0,
            0.5,
            0.1
        )
        .is_err());
    }
}
