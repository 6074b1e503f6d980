//! Sequential acceptance of significant features.
//!
//! Each round estimates the valuations of the remaining candidates in the
//! game restricted to them, with previously accepted features forced into
//! every regression as additional regressors. All features whose z
//! statistic clears the two-sided critical value are accepted at once; the
//! loop stops when a round accepts nothing or no candidates remain.

use serde::{Deserialize, Serialize};

use crate::game::{FeatureSet, GameOracle};
use crate::linmodel::{payoff_with_extra, Dataset, PayoffSpec};
use crate::mc::{estimate, normal_quantile, OrderingSampleConfig};
use crate::seed::mix_seed;
use crate::{Error, Result};

/// One feature's estimate within a round, in global feature indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureValuation {
    pub feature: usize,
    pub lambda: f64,
    pub sigma: f64,
    pub z: f64,
}

/// Record of one selection round.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundRecord {
    /// Candidates still in play at the start of the round.
    pub remaining: Vec<usize>,
    pub estimates: Vec<FeatureValuation>,
    /// Features accepted this round (empty in the final round).
    pub accepted_batch: Vec<usize>,
    /// Critical value `z_{1-α/2}` used.
    pub critical: f64,
}

/// Full decision trail of a selection run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelectionReport {
    pub accepted: Vec<usize>,
    pub rounds: Vec<RoundRecord>,
    pub payoff: String,
    pub gamma: usize,
    pub alpha: f64,
    pub seed: u64,
    pub total_payoff_evaluations: u64,
    /// Column names carried over from the data source, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_names: Option<Vec<String>>,
}

impl SelectionReport {
    pub fn accepted_set(&self, n: usize) -> Result<FeatureSet> {
        FeatureSet::from_indices(&self.accepted, n)
    }
}

/// Seed for round `r`: the master seed itself in round 0 (so round 0 is
/// bit-identical to a plain [`estimate`] call), an independent derived
/// stream afterwards.
fn round_seed(master: u64, round: usize) -> u64 {
    if round == 0 {
        master
    } else {
        mix_seed(master, round as u64)
    }
}

/// Runs the sequential acceptance loop on a dataset.
pub fn sequential_select(
    data: &Dataset,
    spec: &PayoffSpec,
    cfg: &OrderingSampleConfig,
) -> Result<SelectionReport> {
    cfg.validate()?;
    spec.validate()?;
    let n = data.n_candidates();
    let need = n + data.n_fixed() + 2;
    if data.n_obs() < need {
        return Err(Error::Domain(format!(
            "selection over {n} candidates needs at least {need} observations, got {}",
            data.n_obs()
        )));
    }

    let critical = normal_quantile(1.0 - cfg.alpha / 2.0)?;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut accepted: Vec<usize> = Vec::new();
    let mut rounds = Vec::new();
    let mut total_evals = 0u64;

    for round in 0.. {
        if remaining.is_empty() {
            break;
        }
        let m = remaining.len();
        let locals = remaining.clone();
        let accepted_set = FeatureSet::from_indices(&accepted, n.max(1))
            .map_err(|e| e.in_round(round))?;
        let data_ref = data.clone();
        let spec_ref = *spec;
        // The round's game is over the remaining candidates only; a local
        // coalition maps to global columns plus the accepted block.
        let oracle = GameOracle::new(m, move |t: FeatureSet| {
            let global: Vec<usize> = t.iter().map(|i| locals[i]).collect();
            let gset = FeatureSet::from_indices(&global, data_ref.n_candidates())
                .expect("indices validated");
            payoff_with_extra(&data_ref, &spec_ref, gset, Some(&accepted_set))
                .expect("payoff preconditions validated before the loop")
        })
        .map_err(|e| e.in_round(round))?;

        let round_cfg = OrderingSampleConfig::new(cfg.gamma, round_seed(cfg.seed, round), cfg.alpha);
        let est = estimate(&oracle, &round_cfg).map_err(|e| e.in_round(round))?;
        total_evals += oracle.lookups();

        let estimates: Vec<FeatureValuation> = (0..m)
            .map(|i| FeatureValuation {
                feature: remaining[i],
                lambda: est.lambda_hat[i],
                sigma: est.sigma_hat[i],
                z: est.z[i],
            })
            .collect();
        let batch: Vec<usize> = (0..m)
            .filter(|&i| est.z[i].abs() >= critical)
            .map(|i| remaining[i])
            .collect();

        rounds.push(RoundRecord {
            remaining: remaining.clone(),
            estimates,
            accepted_batch: batch.clone(),
            critical,
        });

        if batch.is_empty() {
            break;
        }
        remaining.retain(|i| !batch.contains(i));
        accepted.extend(batch);
        accepted.sort_unstable();
    }

    Ok(SelectionReport {
        accepted,
        rounds,
        payoff: spec.kind.name().to_string(),
        gamma: cfg.gamma,
        alpha: cfg.alpha,
        seed: cfg.seed,
        total_payoff_evaluations: total_evals,
        feature_names: None,
    })
}
