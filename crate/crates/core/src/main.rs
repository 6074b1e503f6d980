use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use lambda_select::game::{
    exact_lambda, verify_expected_shapley, verify_matching_with_prior,
    verify_ordering_representation, GameOracle, MatchedPrior,
};
use lambda_select::linmodel::{Dataset, PayoffKind, PayoffSpec};
use lambda_select::mc::OrderingSampleConfig;
use lambda_select::selector::sequential_select;
use lambda_select::simlab::{run_study, Method, SimConfig};
use lambda_select::{mix_seed, Error};

const VERIFY_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "lambda-select",
    about = "Feature selection by expected marginal-effect valuation"
)]
struct Cli {
    /// Worker threads (0 = all cores). Outputs never depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select features from a CSV dataset.
    Select {
        /// CSV with a header row; `fixed:` columns become fixed regressors.
        #[arg(long)]
        input: PathBuf,
        /// Name of the dependent-variable column.
        #[arg(long)]
        target: String,
        /// Payoff: r2, ar2, f, bic, or rmse.
        #[arg(long, default_value = "ar2")]
        payoff: String,
        /// Ordering sample size per round.
        #[arg(long, default_value_t = 100)]
        gamma: usize,
        /// Two-sided significance level.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report output path (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Train fraction for the rmse payoff.
        #[arg(long, default_value_t = 0.8)]
        split_fraction: f64,
        /// Seed for the rmse train/test split.
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
    },
    /// Run a simulation study against a known data-generating process.
    Simulate {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        true_size: usize,
        #[arg(long, default_value_t = 100)]
        t_obs: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// lambda, stepwise, aic, bic, or oracle.
        #[arg(long, default_value = "lambda")]
        method: String,
        /// Payoff for the lambda method.
        #[arg(long, default_value = "ar2")]
        payoff: String,
        #[arg(long, default_value_t = 100)]
        gamma: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Study output path (JSON); a CSV summary lands next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        p_enter: f64,
        #[arg(long, default_value_t = 0.10)]
        p_remove: f64,
        #[arg(long, default_value_t = 0.5)]
        coef_low: f64,
        #[arg(long, default_value_t = 3.0)]
        coef_high: f64,
        #[arg(long, default_value_t = 0.7)]
        noise_r2: f64,
    },
    /// Check the matching, expected-Shapley, and ordering identities on
    /// seeded random games.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Cap on the game sizes checked (speeds up smoke runs).
        #[arg(long)]
        max_n: Option<usize>,
        /// JSON game {"n": ..., "values": [...]} to verify instead of
        /// random games.
        #[arg(long)]
        game_file: Option<PathBuf>,
        /// Negative-control hook: verify against a deliberately wrong
        /// prior; the run must then fail.
        #[arg(long, hide = true)]
        corrupt_prior: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Input(_) | Error::Csv(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Domain(_) | Error::Capacity { .. } => 3,
        Error::Config(_) => 4,
        Error::Round { source, .. } => exit_code_for(source),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let result = match cli.command {
        Command::Select {
            input,
            target,
            payoff,
            gamma,
            alpha,
            seed,
            out,
            split_fraction,
            split_seed,
        } => cmd_select(
            &input,
            &target,
            &payoff,
            gamma,
            alpha,
            seed,
            &out,
            split_fraction,
            split_seed,
        ),
        Command::Simulate {
            n,
            true_size,
            t_obs,
            trials,
            method,
            payoff,
            gamma,
            alpha,
            seed,
            out,
            p_enter,
            p_remove,
            coef_low,
            coef_high,
            noise_r2,
        } => cmd_simulate(SimulateArgs {
            n,
            true_size,
            t_obs,
            trials,
            method,
            payoff,
            gamma,
            alpha,
            seed,
            out,
            p_enter,
            p_remove,
            coef_low,
            coef_high,
            noise_r2,
        }),
        Command::Verify {
            seed,
            max_n,
            game_file,
            corrupt_prior,
        } => cmd_verify(seed, max_n, game_file.as_deref(), corrupt_prior),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_select(
    input: &std::path::Path,
    target: &str,
    payoff: &str,
    gamma: usize,
    alpha: f64,
    seed: u64,
    out: &std::path::Path,
    split_fraction: f64,
    split_seed: u64,
) -> Result<ExitCode, Error> {
    let data = Dataset::from_csv(input, target)?;
    if let Some(w) = data.size_warning() {
        eprintln!("warning: {w}");
    }
    if gamma < 100 {
        eprintln!("warning: gamma = {gamma} is below the recommended minimum of 100");
    }
    let kind = PayoffKind::parse(payoff)?;
    let spec = PayoffSpec::new(kind).with_split(split_fraction, split_seed);
    let cfg = OrderingSampleConfig::new(gamma, seed, alpha);
    let mut report = sequential_select(&data, &spec, &cfg)?;
    report.feature_names = Some(data.feature_names().to_vec());

    let names = data.feature_names();
    println!("accepted features:");
    if report.accepted.is_empty() {
        println!("  (none)");
    }
    for &i in &report.accepted {
        println!("  {}", names[i]);
    }
    println!("{:<16} {:>12} {:>12} {:>9}", "feature", "lambda", "sigma", "z");
    for i in 0..data.n_candidates() {
        // Last round in which the feature was estimated.
        if let Some(fv) = report
            .rounds
            .iter()
            .rev()
            .flat_map(|r| r.estimates.iter())
            .find(|fv| fv.feature == i)
        {
            println!(
                "{:<16} {:>12.6} {:>12.6} {:>9.3}",
                names[i], fv.lambda, fv.sigma, fv.z
            );
        }
    }

    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out, json + "\n")?;
    Ok(ExitCode::SUCCESS)
}

struct SimulateArgs {
    n: usize,
    true_size: usize,
    t_obs: usize,
    trials: usize,
    method: String,
    payoff: String,
    gamma: usize,
    alpha: f64,
    seed: u64,
    out: PathBuf,
    p_enter: f64,
    p_remove: f64,
    coef_low: f64,
    coef_high: f64,
    noise_r2: f64,
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let method = match args.method.to_ascii_lowercase().as_str() {
        "lambda" => Method::Lambda {
            payoff: PayoffSpec::new(PayoffKind::parse(&args.payoff)?),
        },
        "stepwise" => Method::Stepwise {
            p_enter: args.p_enter,
            p_remove: args.p_remove,
        },
        "aic" => Method::BestSubsetAic,
        "bic" => Method::BestSubsetBic,
        "oracle" => Method::Oracle,
        other => {
            return Err(Error::Config(format!(
                "unknown method '{other}' (expected lambda, stepwise, aic, bic, or oracle)"
            )))
        }
    };
    let cfg = SimConfig {
        n: args.n,
        true_size: args.true_size,
        t_obs: args.t_obs,
        trials: args.trials,
        seed: args.seed,
        method,
        gamma: args.gamma,
        alpha: args.alpha,
        coef_low: args.coef_low,
        coef_high: args.coef_high,
        noise_r2_target: args.noise_r2,
    };
    let study = run_study(&cfg)?;

    let t = &study.tally;
    println!(
        "trials {}  exact {}  under1 {}  under2+ {}  over1 {}  over2+ {}  failures {}",
        t.trials, t.exact, t.under1, t.under2plus, t.over1, t.over2plus, t.failures
    );

    let json = serde_json::to_string_pretty(&study)?;
    std::fs::write(&args.out, json + "\n")?;
    std::fs::write(args.out.with_extension("csv"), t.to_csv())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct GameFile {
    n: usize,
    values: Vec<f64>,
}

fn random_game(n: usize, seed: u64) -> Result<GameOracle, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..1u64 << n).map(|_| rng.random::<f64>()).collect();
    GameOracle::from_table(n, values)
}

fn cmd_verify(
    seed: u64,
    max_n: Option<usize>,
    game_file: Option<&std::path::Path>,
    corrupt_prior: bool,
) -> Result<ExitCode, Error> {
    let mut worst = 0.0f64;
    let cap = |limit: usize| max_n.map_or(limit, |m| m.min(limit));

    let prior_for = |n: usize| -> Result<MatchedPrior, Error> {
        if corrupt_prior {
            MatchedPrior::corrupted(n, 0.1)
        } else {
            MatchedPrior::new(n)
        }
    };

    if let Some(path) = game_file {
        let gf: GameFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let game = GameOracle::from_table(gf.n, gf.values)?;
        print!("lambda =");
        for i in 0..gf.n {
            print!(" {:.6}", exact_lambda(&game, i)?);
        }
        println!();
        let res = verify_matching_with_prior(&game, &prior_for(gf.n)?)?.abs();
        println!("matching residual (n={}): {:.3e}", gf.n, res);
        worst = worst.max(res);
        if gf.n <= cap(12) {
            let dev = verify_expected_shapley(&game)?;
            println!("expected-Shapley deviation: {dev:.3e}");
            worst = worst.max(dev);
        }
        if gf.n <= cap(8) {
            let dev = verify_ordering_representation(&game)?;
            println!("ordering-representation deviation: {dev:.3e}");
            worst = worst.max(dev);
        }
    } else {
        for n in 2..=cap(10) {
            let mut max_res = 0.0f64;
            for k in 0..10u64 {
                let game = random_game(n, mix_seed(seed, n as u64 * 1000 + k))?;
                max_res = max_res.max(verify_matching_with_prior(&game, &prior_for(n)?)?.abs());
            }
            println!("matching residual          n={n:>2}: {max_res:.3e}");
            worst = worst.max(max_res);
        }
        for n in 2..=cap(8) {
            let mut max_dev = 0.0f64;
            for k in 0..3u64 {
                let game = random_game(n, mix_seed(seed, n as u64 * 2000 + k))?;
                max_dev = max_dev.max(verify_expected_shapley(&game)?);
            }
            println!("expected-Shapley deviation n={n:>2}: {max_dev:.3e}");
            worst = worst.max(max_dev);
        }
        for n in 2..=cap(7) {
            let mut max_dev = 0.0f64;
            for k in 0..3u64 {
                let game = random_game(n, mix_seed(seed, n as u64 * 3000 + k))?;
                max_dev = max_dev.max(verify_ordering_representation(&game)?);
            }
            println!("ordering representation    n={n:>2}: {max_dev:.3e}");
            worst = worst.max(max_dev);
        }
    }

    if worst < VERIFY_TOL {
        println!("all residuals below {VERIFY_TOL:.0e}");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed: max residual {worst:.3e} >= {VERIFY_TOL:.0e}");
        Ok(ExitCode::from(5))
    }
}
