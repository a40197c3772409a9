//! Running a named learner against an oracle and producing run records.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use shuffled_monotone::approx::{
    eps_exact_learn_with, realizable_learn, tolerant_learn, ApproxParams,
};
use shuffled_monotone::exact::{baseline_learn, shuffled_monotone_learn_with};
use shuffled_monotone::generators::{corrupt_labels, CorruptionMode};
use shuffled_monotone::instance::{PlantedTruth, ShuffledInstance};
use shuffled_monotone::io::load_instance;
use shuffled_monotone::oracle::{LabelOracle, LabelSource};
use shuffled_monotone::ror::TieBreak;
use shuffled_monotone::trace::{JsonTrace, LearnObserver, NoopObserver};
use shuffled_monotone::LearnError;

use crate::{usage, AppError};

#[derive(Args)]
pub struct LearnArgs {
    /// Learner: exact | baseline | eps-exact | realizable | tolerant
    pub learner: String,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fraction of labels to flip before learning.
    #[arg(long)]
    pub corrupt: Option<f64>,
    #[arg(long, default_value = "uniform")]
    pub corrupt_mode: String,
    /// Write a JSON-lines execution trace here (exact and eps-exact).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output format for the run record: json | csv
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceMeta {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// One learner execution against one oracle.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub learner: String,
    pub instance: InstanceMeta,
    pub seed: u64,
    pub distinct_queries: usize,
    pub total_calls: u64,
    pub correct: bool,
    /// Mismatch fraction against the planted labels; absent when the
    /// learner reported not-realizable.
    pub error_fraction: Option<f64>,
    pub wall_time_ms: f64,
    pub status: String,
}

/// The learner's raw output before scoring.
pub struct RunOutput {
    pub labeling: Option<Vec<bool>>,
    pub status: String,
}

pub struct OracleSetup {
    pub oracle: LabelOracle,
    /// The labels learners are scored against (pre-corruption truth).
    pub reference: Vec<bool>,
}

pub fn parse_corrupt_mode(s: &str) -> Result<CorruptionMode, AppError> {
    match s {
        "uniform" => Ok(CorruptionMode::Uniform),
        "boundary" => Ok(CorruptionMode::Boundary),
        other => usage(format!("unknown corruption mode {other:?}")),
    }
}

/// Builds the oracle for a run, applying corruption first.
pub fn setup_oracle(
    labels: &[bool],
    truth: Option<&PlantedTruth>,
    inst: &ShuffledInstance,
    corrupt: Option<f64>,
    mode: CorruptionMode,
    seed: u64,
) -> Result<OracleSetup, AppError> {
    let n = labels.len();
    let oracle = match corrupt {
        None => LabelOracle::new(labels.to_vec()),
        Some(frac) => {
            if !(0.0..=1.0).contains(&frac) {
                return usage("--corrupt must be in [0, 1]");
            }
            let budget = (frac * n as f64).floor() as usize;
            let fallback = PlantedTruth {
                labeling: labels.to_vec(),
                monotone_index: None,
                boundary_low: None,
                boundary_high: None,
            };
            let t = truth.unwrap_or(&fallback);
            if mode == CorruptionMode::Boundary && t.monotone_index.is_none() {
                return usage("boundary corruption needs a planted monotone index");
            }
            let flips = corrupt_labels(t, inst, budget, mode, seed)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            LabelOracle::with_corruption(labels.to_vec(), flips)
        }
    };
    Ok(OracleSetup { oracle, reference: labels.to_vec() })
}

/// Dispatches a learner by name. `eps`/`delta` are required by the
/// approximate learners.
pub fn run_learner(
    name: &str,
    oracle: &mut LabelOracle,
    inst: &ShuffledInstance,
    seed: u64,
    eps: Option<f64>,
    delta: Option<f64>,
    observer: &mut dyn LearnObserver,
) -> Result<RunOutput, AppError> {
    let need_eps = || -> Result<f64, AppError> {
        eps.ok_or(AppError::Usage(format!("{name} requires --eps")))
    };
    let need_delta = || -> Result<f64, AppError> {
        delta.ok_or(AppError::Usage(format!("{name} requires --delta")))
    };
    let from_exact = |r: Result<Vec<bool>, LearnError>| -> RunOutput {
        match r {
            Ok(labeling) => RunOutput { labeling: Some(labeling), status: "ok".into() },
            Err(LearnError::NotRealizable) => {
                RunOutput { labeling: None, status: "not_realizable".into() }
            }
            Err(LearnError::EmptyCandidates) => {
                RunOutput { labeling: None, status: "not_realizable".into() }
            }
        }
    };
    match name {
        "exact" => {
            let r = shuffled_monotone_learn_with(oracle, inst, TieBreak::Smallest, observer);
            Ok(from_exact(r))
        }
        "baseline" => Ok(from_exact(baseline_learn(oracle, inst))),
        "eps-exact" => {
            let eps = need_eps()?;
            if !(eps > 0.0) {
                return usage("--eps must be positive");
            }
            match eps_exact_learn_with(oracle, inst, eps, TieBreak::Smallest, observer) {
                Ok(r) => Ok(RunOutput { labeling: Some(r.labeling), status: "ok".into() }),
                Err(_) => Ok(RunOutput { labeling: None, status: "not_realizable".into() }),
            }
        }
        "realizable" => {
            let params = checked_params(need_eps()?, need_delta()?, seed)?;
            match realizable_learn(oracle, inst, &params) {
                Ok(h) => Ok(RunOutput { labeling: Some(h.labeling(inst)), status: "ok".into() }),
                Err(_) => Ok(RunOutput { labeling: None, status: "not_realizable".into() }),
            }
        }
        "tolerant" => {
            let params = checked_params(need_eps()?, need_delta()?, seed)?;
            let h = tolerant_learn(oracle, inst, &params);
            Ok(RunOutput { labeling: Some(h.labeling(inst)), status: "ok".into() })
        }
        other => usage(format!("unknown learner {other:?}")),
    }
}

fn checked_params(eps: f64, delta: f64, seed: u64) -> Result<ApproxParams, AppError> {
    if !(eps > 0.0 && eps < 1.0) {
        return usage("--eps must be in (0, 1)");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return usage("--delta must be in (0, 1)");
    }
    Ok(ApproxParams::new(eps, delta, seed))
}

pub fn score(output: &RunOutput, reference: &[bool]) -> (bool, Option<f64>) {
    match &output.labeling {
        None => (false, None),
        Some(l) => {
            let mismatches = l.iter().zip(reference).filter(|(a, b)| a != b).count();
            let frac = mismatches as f64 / reference.len() as f64;
            (mismatches == 0, Some(frac))
        }
    }
}

pub fn cmd_learn(args: LearnArgs) -> Result<(), AppError> {
    let loaded = load_instance(&args.instance)
        .map_err(|e| AppError::Usage(format!("cannot load {}: {e}", args.instance.display())))?;
    let mode = parse_corrupt_mode(&args.corrupt_mode)?;
    let setup = setup_oracle(
        &loaded.labels,
        loaded.truth.as_ref(),
        &loaded.instance,
        args.corrupt,
        mode,
        args.seed,
    )?;
    let mut oracle = setup.oracle;

    let mut trace = JsonTrace::new();
    let mut noop = NoopObserver;
    let observer: &mut dyn LearnObserver =
        if args.trace.is_some() { &mut trace } else { &mut noop };

    let start = Instant::now();
    let output = run_learner(
        &args.learner,
        &mut oracle,
        &loaded.instance,
        args.seed,
        args.eps,
        args.delta,
        observer,
    )?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    if let Some(path) = &args.trace {
        std::fs::write(path, trace.to_json_lines())
            .map_err(|e| AppError::Usage(format!("cannot write trace: {e}")))?;
    }

    let (correct, error_fraction) = score(&output, &setup.reference);
    let record = RunRecord {
        learner: args.learner.clone(),
        instance: InstanceMeta {
            n: loaded.instance.n(),
            d: loaded.instance.num_directions(),
            generator: loaded.metadata.map(|m| m.generator),
        },
        seed: args.seed,
        distinct_queries: oracle.distinct_queries(),
        total_calls: oracle.total_calls(),
        correct,
        error_fraction,
        wall_time_ms,
        status: output.status,
    };
    match args.format.as_str() {
        "json" => println!(
            "{}",
            serde_json::to_string(&record).map_err(|e| AppError::Internal(e.to_string()))?
        ),
        "csv" => {
            println!(
                "learner,n,D,seed,distinct_queries,total_calls,correct,error_fraction,status"
            );
            println!(
                "{},{},{},{},{},{},{},{},{}",
                record.learner,
                record.instance.n,
                record.instance.d,
                record.seed,
                record.distinct_queries,
                record.total_calls,
                record.correct,
                record
                    .error_fraction
                    .map_or(String::new(), |f| format!("{f}")),
                record.status
            );
        }
        other => return usage(format!("unknown format {other:?}")),
    }
    Ok(())
}
