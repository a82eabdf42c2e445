//! `qpt`: scenario runner for generalized-measurement statistics.
//!
//! Every subcommand reads a JSON scenario file (see the repository README
//! for the schema), prints a machine-readable report to standard output and
//! diagnostics to standard error, and exits nonzero on any failure.

mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use qpt_core::Complex64;

use qpt_core::frequency::{convergence_study, ContextKind, ContextModel};
use qpt_core::interference::{
    classify_transformation, lambda_report, superposition_rule, Transformation,
};
use qpt_core::sequential::{quantum_bayes_check, sequential_joint};
use qpt_core::state::PureState;

use output::{fmt_f64, to_json_string};
use scenario::{AnalysisSpec, ModelSpec, Scenario};

#[derive(Parser)]
#[command(
    name = "qpt",
    version,
    about = "Generalized quantum measurement statistics: \
exact probabilities, interference coefficients and frequency simulation"
)]
struct Cli {
    /// Structural tolerance for validation, clamping and classification.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Base RNG seed for simulations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ensemble size used when no --schedule is given.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = parse_count)]
    trials: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every component's invariants and report the numeric gaps.
    Validate { path: PathBuf },
    /// Outcome probabilities of a named POVM on the scenario state.
    Probs {
        path: PathBuf,
        /// POVM name (defaults to the analysis block).
        #[arg(long)]
        povm: Option<String>,
        /// Comma-separated outcome labels for a subset probability.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
    },
    /// Joint, marginal and Bayes-identity gap for a two-step measurement.
    Sequential {
        path: PathBuf,
        #[arg(long)]
        first: Option<String>,
        #[arg(long)]
        second: Option<String>,
    },
    /// Interference coefficients λ_j with bounds and classification.
    Lambda {
        path: PathBuf,
        #[arg(long)]
        first: Option<String>,
        #[arg(long)]
        second: Option<String>,
    },
    /// Term-by-term superposition probability rule (analysis-driven).
    Superpose { path: PathBuf },
    /// Frequency simulation over an ensemble-size schedule; CSV output.
    FreqSim {
        path: PathBuf,
        /// Comma-separated ensemble sizes, e.g. 1e3,1e4,1e5.
        #[arg(long, value_delimiter = ',', value_parser = parse_count)]
        schedule: Option<Vec<u64>>,
        /// Number of seeds to run, starting from --seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Classify an interference coefficient.
    Classify {
        #[arg(allow_negative_numbers = true)]
        lambda: f64,
    },
}

/// Accepts plain integers and scientific notation ("1e5").
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if x < 1.0 || x > 2f64.powi(53) || x.fract() != 0.0 {
        return Err(format!("`{s}` is not a positive integer count"));
    }
    Ok(x as u64)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Validate { path } => {
            let scenario = Scenario::load(path)?;
            let (report, ok) = scenario::validate_report(&scenario, cli.tol);
            println!("{}", to_json_string(&report));
            if !ok {
                eprintln!("validation failed (see report)");
            }
            Ok(ok)
        }
        Command::Probs { path, povm, subset } => {
            let scenario = Scenario::load(path)?;
            run_probs(&scenario, povm.clone(), subset.clone(), cli.tol)?;
            Ok(true)
        }
        Command::Sequential {
            path,
            first,
            second,
        } => {
            let scenario = Scenario::load(path)?;
            run_sequential(&scenario, first.clone(), second.clone(), cli.tol)?;
            Ok(true)
        }
        Command::Lambda {
            path,
            first,
            second,
        } => {
            let scenario = Scenario::load(path)?;
            run_lambda(&scenario, first.clone(), second.clone(), cli.tol)?;
            Ok(true)
        }
        Command::Superpose { path } => {
            let scenario = Scenario::load(path)?;
            run_superpose(&scenario, cli.tol)?;
            Ok(true)
        }
        Command::FreqSim {
            path,
            schedule,
            seeds,
        } => {
            let scenario = Scenario::load(path)?;
            let schedule = schedule.clone().unwrap_or_else(|| vec![cli.trials]);
            run_freq_sim(&scenario, &schedule, cli.seed, *seeds, cli.tol)?;
            Ok(true)
        }
        Command::Classify { lambda } => {
            run_classify(*lambda, cli.tol);
            Ok(true)
        }
    }
}

/// First/second channel names: explicit flags win, then the analysis block.
fn channel_pair(
    scenario: &Scenario,
    first: Option<String>,
    second: Option<String>,
) -> Result<(String, String)> {
    let (from_first, from_second) = match &scenario.analysis {
        Some(AnalysisSpec::Sequential { first, second })
        | Some(AnalysisSpec::Lambda { first, second })
        | Some(AnalysisSpec::FreqSim {
            model: ModelSpec::QuantumDriven { first, second },
        }) => (Some(first.clone()), Some(second.clone())),
        _ => (None, None),
    };
    let first = first
        .or(from_first)
        .ok_or_else(|| anyhow!("no first channel: pass --first or add an analysis block"))?;
    let second = second
        .or(from_second)
        .ok_or_else(|| anyhow!("no second channel: pass --second or add an analysis block"))?;
    Ok((first, second))
}

fn run_probs(
    scenario: &Scenario,
    povm_name: Option<String>,
    subset: Option<Vec<String>>,
    tol: f64,
) -> Result<()> {
    let (analysis_povm, analysis_subset) = match &scenario.analysis {
        Some(AnalysisSpec::Probs { povm, subset }) => (Some(povm.clone()), subset.clone()),
        _ => (None, None),
    };
    let name = povm_name
        .or(analysis_povm)
        .ok_or_else(|| anyhow!("no POVM named: pass --povm or add an analysis block"))?;
    let povm = scenario.povm(&name, tol)?;
    let rho = scenario.density(tol)?;
    let probabilities = povm.outcome_probabilities(&rho, tol)?;

    let mut report = json!({
        "povm": name,
        "outcomes": povm.outcomes().labels(),
        "probabilities": probabilities,
    });
    if let Some(subset) = subset.or(analysis_subset) {
        let refs: Vec<&str> = subset.iter().map(|s| s.as_str()).collect();
        let p = povm.probability(&rho, &refs, tol)?;
        report["subset"] = json!(subset);
        report["subset_probability"] = json!(p);
    }
    println!("{}", to_json_string(&report));
    Ok(())
}

fn run_sequential(
    scenario: &Scenario,
    first: Option<String>,
    second: Option<String>,
    tol: f64,
) -> Result<()> {
    let (first, second) = channel_pair(scenario, first, second)?;
    let rho = scenario.density(tol)?;
    let a = scenario.channel(&first, tol)?;
    let b = scenario.channel(&second, tol)?;
    let seq = sequential_joint(&rho, &a, &b, tol)?;
    let bayes = quantum_bayes_check(&rho, &a, &b, tol)?;
    let report = json!({
        "first": seq.first.labels(),
        "second": seq.second.labels(),
        "joint": seq.joint,
        "marginal_second": seq.marginal_second,
        "bayes_gap": bayes.max_gap,
    });
    println!("{}", to_json_string(&report));
    Ok(())
}

fn run_lambda(
    scenario: &Scenario,
    first: Option<String>,
    second: Option<String>,
    tol: f64,
) -> Result<()> {
    let (first_name, second_name) = channel_pair(scenario, first, second)?;
    let rho = scenario.density(tol)?;
    let a = scenario.channel(&first_name, tol)?;
    let b = scenario.channel(&second_name, tol)?;
    let report = lambda_report(&rho, &a, &b, tol)?;
    let value = json!({
        "first": first_name,
        "second": second_name,
        "max_commutator": report.max_commutator,
        "outcomes": serde_json::to_value(&report.outcomes)?,
    });
    println!("{}", to_json_string(&value));
    Ok(())
}

fn run_superpose(scenario: &Scenario, tol: f64) -> Result<()> {
    let Some(AnalysisSpec::Superpose {
        phi1,
        phi2,
        alpha,
        beta,
        povm,
        subset,
    }) = &scenario.analysis
    else {
        return Err(anyhow!("scenario has no superpose analysis block"));
    };
    let phi1 = PureState::new(phi1.clone(), tol).context("invalid phi1")?;
    let phi2 = PureState::new(phi2.clone(), tol).context("invalid phi2")?;
    let povm = scenario.povm(povm, tol)?;
    let refs: Vec<&str> = subset.iter().map(|s| s.as_str()).collect();
    let dec = superposition_rule(
        &phi1,
        &phi2,
        Complex64::new(alpha[0], alpha[1]),
        Complex64::new(beta[0], beta[1]),
        &povm,
        &refs,
        tol,
    )?;
    println!("{}", to_json_string(&serde_json::to_value(&dec)?));
    Ok(())
}

fn row_class(lambda: &[Option<f64>; 2], tol: f64) -> &'static str {
    let defined: Vec<f64> = lambda.iter().flatten().copied().collect();
    if defined.is_empty() {
        "degenerate"
    } else if defined.iter().any(|l| l.abs() >= 1.0) {
        "hyperbolic"
    } else if defined.iter().any(|l| l.abs() > tol) {
        "trigonometric"
    } else {
        "classical"
    }
}

fn run_freq_sim(
    scenario: &Scenario,
    schedule: &[u64],
    base_seed: u64,
    seed_count: u64,
    tol: f64,
) -> Result<()> {
    let Some(AnalysisSpec::FreqSim { model }) = &scenario.analysis else {
        return Err(anyhow!("scenario has no freq-sim analysis block"));
    };
    let kind = match model {
        ModelSpec::ClassicalIndependent { joint } => {
            ContextKind::ClassicalIndependent { joint: *joint }
        }
        ModelSpec::ClassicalPerturbed { joint, kernels } => ContextKind::ClassicalPerturbed {
            joint: *joint,
            kernels: *kernels,
        },
        ModelSpec::QuantumDriven { first, second } => {
            eprintln!(
                "note: hidden joint counts are synthesized bookkeeping \
(proportional split of the B margin); all reported statistics come from observable frequencies"
            );
            ContextKind::QuantumDriven {
                state: scenario.density(tol)?,
                first: scenario.channel(first, tol)?,
                second: scenario.channel(second, tol)?,
            }
        }
    };
    let model = ContextModel::new(kind, base_seed, tol)?;
    if seed_count == 0 {
        return Err(anyhow!("--seeds must be at least 1"));
    }
    let seeds: Vec<u64> = (0..seed_count).map(|k| base_seed + k).collect();
    let study = convergence_study(&model, schedule, &seeds, tol)?;

    println!("N,seed,delta1,delta2,lambda1,lambda2,class");
    for row in &study.rows {
        let lam = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        println!(
            "{},{},{},{},{},{},{}",
            row.trials,
            row.seed,
            fmt_f64(row.delta[0]),
            fmt_f64(row.delta[1]),
            lam(row.lambda[0]),
            lam(row.lambda[1]),
            row_class(&row.lambda, tol),
        );
    }
    for j in 0..2 {
        if let (Some(limit), Some(dev)) = (study.limit_lambda[j], study.sqrt_n_deviation[j]) {
            eprintln!(
                "limit lambda{}: {} (max sqrt(N)-scaled deviation {:.3}), {}",
                j + 1,
                fmt_f64(limit),
                dev,
                study.classification[j].map_or("undefined", |c| c.name()),
            );
        }
    }
    Ok(())
}

fn run_classify(lambda: f64, tol: f64) {
    let class = classify_transformation(lambda, tol);
    let mut report = json!({
        "lambda": lambda,
        "class": class.name(),
        "phase": class.phase(),
    });
    if let Transformation::Hyperbolic { negative, .. } = class {
        report["negative"] = json!(negative);
    }
    println!("{}", to_json_string(&report));
}
