//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them all).

use lambda_select::game::{
    exact_lambda, expected_payoff, verify_expected_shapley, verify_matching,
    verify_ordering_representation, FeatureSet, GameOracle,
};
use lambda_select::linmodel::{Dataset, PayoffKind, PayoffSpec};
use lambda_select::mc::{estimate, OrderingSampleConfig};
use lambda_select::selector::sequential_select;
use lambda_select::simlab::{best_subset_ic, run_study, Criterion, Method, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn random_table_game(n: usize, seed: u64) -> GameOracle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..1usize << n)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    GameOracle::from_table(n, values).unwrap()
}

#[test]
fn criterion_1_matching_identity() {
    let mut max_resid = 0.0f64;
    for n in 2..=10 {
        for g in 0..100u64 {
            let game = random_table_game(n, 1000 * n as u64 + g);
            max_resid = max_resid.max(verify_matching(&game).unwrap());
        }
    }
    report(
        1,
        "matching identity, 100 games per n in 2..=10",
        max_resid < 1e-10,
        &format!("max |Σλ − (E v − v(∅))| = {max_resid:.3e}"),
    );
}

#[test]
fn criterion_2_expected_shapley_identity() {
    let mut max_resid = 0.0f64;
    for n in 2..=8 {
        for g in 0..20u64 {
            let game = random_table_game(n, 2000 * n as u64 + g);
            max_resid = max_resid.max(verify_expected_shapley(&game).unwrap());
        }
    }
    report(
        2,
        "expected-Shapley identity, 20 games per n in 2..=8",
        max_resid < 1e-10,
        &format!("max |E_Z Ψ[v_Z] − λ| = {max_resid:.3e}"),
    );
}

#[test]
fn criterion_3_ordering_representation() {
    let mut max_resid = 0.0f64;
    for n in 2..=7 {
        for g in 0..20u64 {
            let game = random_table_game(n, 3000 * n as u64 + g);
            max_resid = max_resid.max(verify_ordering_representation(&game).unwrap());
        }
    }
    report(
        3,
        "ordering representation, 20 games per n in 2..=7",
        max_resid < 1e-10,
        &format!("max |ordering average − λ| = {max_resid:.3e}"),
    );
}

#[test]
fn criterion_4_monte_carlo_within_4_sigma() {
    let n = 8;
    let game = random_table_game(n, 44);
    let exact: Vec<f64> = (0..n).map(|i| exact_lambda(&game, i).unwrap()).collect();
    let mut ok_runs = 0;
    for seed in 0..100u64 {
        let cfg = OrderingSampleConfig::new(20_000, seed, 0.05);
        let est = estimate(&game, &cfg).unwrap();
        let all_within = (0..n).all(|i| (est.lambda_hat[i] - exact[i]).abs() <= 4.0 * est.sigma_hat[i]);
        if all_within {
            ok_runs += 1;
        }
    }
    report(
        4,
        "n=8, γ=20000: λ̂ within 4σ̂ of exact λ for all features",
        ok_runs >= 99,
        &format!("{ok_runs}/100 seeds within bounds"),
    );
}

fn table1_study(kind: PayoffKind) -> (f64, f64) {
    let cfg = SimConfig {
        trials: 200,
        ..SimConfig::defaults(Method::Lambda {
            payoff: PayoffSpec::new(kind),
        })
    };
    let study = run_study(&cfg).unwrap();
    let t = &study.tally;
    let trials = t.trials as f64;
    (t.exact as f64 / trials, t.over2plus as f64 / trials)
}

#[test]
fn criterion_5_desk_scale_table_1() {
    let (exact, over2) = table1_study(PayoffKind::Ar2);
    report(
        5,
        "n=20 |S|=4 AR2 study: exact ≥ 0.80, |Ŝ∖S|≥2 rate ≤ 0.05",
        exact >= 0.80 && over2 <= 0.05,
        &format!("exact rate {exact:.3}, over-fit(≥2) rate {over2:.3}"),
    );
}

#[test]
fn criterion_6_payoff_robustness() {
    let rates = [
        ("ar2", table1_study(PayoffKind::Ar2).0),
        ("r2", table1_study(PayoffKind::R2).0),
        ("f", table1_study(PayoffKind::F).0),
        ("bic", table1_study(PayoffKind::Bic).0),
    ];
    let max = rates.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let min = rates.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let detail: Vec<String> = rates.iter().map(|(k, r)| format!("{k}={r:.3}")).collect();
    report(
        6,
        "exact rates across payoffs within 0.10",
        max - min <= 0.10,
        &format!("spread {:.3} ({})", max - min, detail.join(", ")),
    );
}

#[test]
fn criterion_7_redundancy() {
    let spec = PayoffSpec::new(PayoffKind::R2);
    let cfg = OrderingSampleConfig::new(100, 77, 0.05);
    let mut conditioned = 0;
    let mut violations = 0;
    for rep in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + rep);
        let t_obs = 60;
        let x0: Vec<f64> = (0..t_obs).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let y: Vec<f64> = (0..t_obs)
            .map(|r| 1.0 + 2.0 * x0[r] + 0.5 * (rng.random::<f64>() - 0.5))
            .collect();
        let data = Dataset::new(y, vec![x0.clone(), x0.clone()], vec![]).unwrap();
        let run_cfg = OrderingSampleConfig::new(cfg.gamma, rep, cfg.alpha);
        let rep_out = sequential_select(&data, &spec, &run_cfg).unwrap();
        if rep_out.rounds[0].accepted_batch.len() == 1 {
            conditioned += 1;
            if rep_out.accepted.len() != 1 {
                violations += 1;
            }
        }
    }
    report(
        7,
        "duplicated column never double-accepted after a single round-1 acceptance",
        violations == 0,
        &format!("{violations} violations; conditional triggered in {conditioned}/100 runs"),
    );
}

#[test]
fn criterion_8_determinism_matrix() {
    let bin = env!("CARGO_BIN_EXE_lambda-select");
    let dir = tempfile::tempdir().unwrap();

    // a small deterministic CSV for the select cases
    let csv_path = dir.path().join("data.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut csv = String::from("y,a,b,c\n");
    for _ in 0..50 {
        let a: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let b: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let c: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let y = 1.0 + 2.0 * a - 1.5 * b + 0.3 * (rng.random::<f64>() - 0.5);
        csv.push_str(&format!("{y},{a},{b},{c}\n"));
    }
    std::fs::write(&csv_path, csv).unwrap();

    let select_payoffs = ["r2", "ar2", "f", "bic", "rmse"];
    let simulate_methods = [("lambda", "ar2"), ("lambda", "r2"), ("stepwise", "ar2"), ("aic", "ar2"), ("bic", "ar2")];
    let mut cases = 0;
    let mut mismatches = Vec::new();

    for payoff in select_payoffs {
        let mut outputs = Vec::new();
        for threads in ["1", "8"] {
            let out = dir.path().join(format!("sel_{payoff}_{threads}.json"));
            let status = Command::new(bin)
                .args([
                    "--threads", threads, "select",
                    "--input", csv_path.to_str().unwrap(),
                    "--target", "y",
                    "--payoff", payoff,
                    "--gamma", "60",
                    "--seed", "9",
                    "--out", out.to_str().unwrap(),
                ])
                .status()
                .unwrap();
            assert!(status.success(), "select --payoff {payoff} failed");
            outputs.push(std::fs::read(&out).unwrap());
            cases += 1;
        }
        if outputs[0] != outputs[1] {
            mismatches.push(format!("select/{payoff}"));
        }
    }

    for (method, payoff) in simulate_methods {
        let mut outputs = Vec::new();
        for threads in ["1", "8"] {
            let out = dir.path().join(format!("sim_{method}_{payoff}_{threads}.json"));
            let status = Command::new(bin)
                .args([
                    "--threads", threads, "simulate",
                    "--n", "6", "--true-size", "2", "--t-obs", "50",
                    "--trials", "3",
                    "--method", method,
                    "--payoff", payoff,
                    "--gamma", "40",
                    "--seed", "11",
                    "--out", out.to_str().unwrap(),
                ])
                .status()
                .unwrap();
            assert!(status.success(), "simulate --method {method} failed");
            let mut bytes = std::fs::read(&out).unwrap();
            bytes.extend(std::fs::read(out.with_extension("csv")).unwrap());
            outputs.push(bytes);
            cases += 1;
        }
        if outputs[0] != outputs[1] {
            mismatches.push(format!("simulate/{method}/{payoff}"));
        }
    }

    report(
        8,
        "byte-identical outputs across --threads 1 vs 8, 20-case matrix",
        mismatches.is_empty() && cases == 20,
        &format!("{cases} runs, mismatches: {mismatches:?}"),
    );
}

#[test]
fn criterion_9_best_subset_bic_zero_noise() {
    let n = 10;
    let t_obs = 60;
    let mut hits = 0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9900 + trial);
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..t_obs).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let true_size = 2 + (trial % 3) as usize;
        let betas: Vec<f64> = (0..true_size)
            .map(|_| 0.5 + 2.5 * rng.random::<f64>())
            .collect();
        let y: Vec<f64> = (0..t_obs)
            .map(|r| 1.0 + (0..true_size).map(|i| betas[i] * cols[i][r]).sum::<f64>())
            .collect();
        let data = Dataset::new(y, cols, vec![]).unwrap();
        let s_hat = best_subset_ic(&data, Criterion::Bic).unwrap();
        let s_true = FeatureSet::from_indices(&(0..true_size).collect::<Vec<_>>(), n).unwrap();
        if s_hat == s_true {
            hits += 1;
        }
    }
    report(
        9,
        "best-subset BIC recovers zero-noise linear truth at n=10",
        hits == 100,
        &format!("{hits}/100 exact recoveries"),
    );
}

// Sanity anchor used by criterion 1's oracle: the fixture game's expected
// payoff under the matched prior is exactly 2.
#[test]
fn fixture_expected_payoff_anchor() {
    let game = GameOracle::from_table(2, vec![0.0, 3.0, 1.0, 4.0]).unwrap();
    let ev = expected_payoff(&game).unwrap();
    assert!((ev - 2.0).abs() < 1e-12);
    assert!((exact_lambda(&game, 0).unwrap() - 1.5).abs() < 1e-12);
    assert!((exact_lambda(&game, 1).unwrap() - 0.5).abs() < 1e-12);
}
