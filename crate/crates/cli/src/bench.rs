//! Benchmark suites: a JSON spec describing (generator, learner, parameter
//! grid, trials) cells expands into a deterministic trial list; results land
//! in a per-trial CSV followed by a per-cell aggregate CSV. Timing columns
//! are deliberately omitted so identical spec and seed give byte-identical
//! output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;

use shuffled_monotone::generators::{
    gen_circle_instance, gen_depth_two_hard, gen_random_shuffled, gen_star_instance,
};
use shuffled_monotone::geometry::{project_to_instance, DirectionSet};
use shuffled_monotone::instance::{PlantedTruth, ShuffledInstance};
use shuffled_monotone::oracle::LabelSource;
use shuffled_monotone::rng::{derive_seed, stream};
use shuffled_monotone::trace::NoopObserver;

use crate::run::{parse_corrupt_mode, run_learner, score, setup_oracle};
use crate::{usage, AppError};

#[derive(Args)]
pub struct BenchArgs {
    /// Path to the suite spec JSON.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (1 = sequential). Results merge in spec order either
    /// way.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
}

#[derive(Debug, Deserialize)]
struct BenchSpec {
    seed: u64,
    cells: Vec<BenchCell>,
}

#[derive(Debug, Deserialize)]
struct BenchCell {
    generator: String,
    learner: String,
    #[serde(default)]
    n: Vec<usize>,
    #[serde(rename = "D", default)]
    d: Vec<usize>,
    #[serde(default)]
    m: Vec<i64>,
    trials: usize,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    corrupt: Option<f64>,
    #[serde(default)]
    corrupt_mode: Option<String>,
}

/// One point of a cell's parameter grid.
#[derive(Debug, Clone)]
struct GridPoint {
    cell: usize,
    generator: String,
    learner: String,
    n: usize,
    d: usize,
    m: i64,
    eps: Option<f64>,
    delta: Option<f64>,
    corrupt: Option<f64>,
    corrupt_mode: String,
}

#[derive(Debug, Clone)]
struct TrialResult {
    point: GridPoint,
    trial: usize,
    seed: u64,
    distinct_queries: usize,
    total_calls: u64,
    correct: bool,
    error_fraction: Option<f64>,
    status: String,
}

fn expand(spec: &BenchSpec) -> Result<Vec<(GridPoint, usize, u64)>, AppError> {
    let mut rows = Vec::new();
    let mut counter = 0u64;
    for (ci, cell) in spec.cells.iter().enumerate() {
        if cell.trials == 0 {
            return usage(format!("cell {ci}: trials must be positive"));
        }
        let base = GridPoint {
            cell: ci,
            generator: cell.generator.clone(),
            learner: cell.learner.clone(),
            n: 0,
            d: 0,
            m: 0,
            eps: cell.eps,
            delta: cell.delta,
            corrupt: cell.corrupt,
            corrupt_mode: cell.corrupt_mode.clone().unwrap_or_else(|| "uniform".into()),
        };
        let points: Vec<GridPoint> = match cell.generator.as_str() {
            "random" => {
                if cell.n.is_empty() || cell.d.is_empty() {
                    return usage(format!("cell {ci}: random needs n and D lists"));
                }
                cell.n
                    .iter()
                    .flat_map(|&n| {
                        cell.d.iter().map(move |&d| (n, d))
                    })
                    .map(|(n, d)| GridPoint { n, d, ..base.clone() })
                    .collect()
            }
            "circle" => {
                if cell.n.is_empty() {
                    return usage(format!("cell {ci}: circle needs an n list"));
                }
                cell.n.iter().map(|&n| GridPoint { n, d: n, ..base.clone() }).collect()
            }
            "star" => {
                if cell.d.is_empty() {
                    return usage(format!("cell {ci}: star needs a D list"));
                }
                cell.d
                    .iter()
                    .map(|&d| GridPoint { n: 2 * d, d, ..base.clone() })
                    .collect()
            }
            "depth-two" => {
                if cell.m.is_empty() {
                    return usage(format!("cell {ci}: depth-two needs an m list"));
                }
                cell.m
                    .iter()
                    .map(|&m| GridPoint {
                        n: (2 * m + 1) as usize,
                        d: 2,
                        m,
                        ..base.clone()
                    })
                    .collect()
            }
            other => return usage(format!("cell {ci}: unknown generator {other:?}")),
        };
        for p in points {
            for trial in 0..cell.trials {
                let seed = derive_seed(spec.seed, stream::TRIAL, counter);
                counter += 1;
                rows.push((p.clone(), trial, seed));
            }
        }
    }
    Ok(rows)
}

fn materialize(
    p: &GridPoint,
    seed: u64,
) -> Result<(ShuffledInstance, Vec<bool>, Option<PlantedTruth>), AppError> {
    match p.generator.as_str() {
        "random" => {
            let g = gen_random_shuffled(p.n, p.d, seed);
            Ok((g.instance, g.truth.labeling.clone(), Some(g.truth)))
        }
        "circle" => {
            let (points, hyps) = gen_circle_instance(p.n);
            let dirs = DirectionSet::new(hyps.iter().map(|h| h.direction.clone()).collect())
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let inst = project_to_instance(&points, &dirs)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let truth = PlantedTruth::from_hypothesis(&inst, 1, p.n)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            Ok((inst, truth.labeling.clone(), Some(truth)))
        }
        "star" => {
            let (points, _) = gen_star_instance(p.d);
            let axes = (0..p.d)
                .map(|i| {
                    let mut u = vec![0.0; p.d];
                    u[i] = 1.0;
                    u
                })
                .collect();
            let dirs =
                DirectionSet::new(axes).map_err(|e| AppError::Internal(e.to_string()))?;
            let inst = project_to_instance(&points, &dirs)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let truth = PlantedTruth::from_hypothesis(&inst, 1, p.d + 1)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            Ok((inst, truth.labeling.clone(), Some(truth)))
        }
        "depth-two" => {
            let (points, labelings) = gen_depth_two_hard(p.m);
            let dirs = DirectionSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let inst = project_to_instance(&points, &dirs)
                .map_err(|e| AppError::Internal(e.to_string()))?;
            let labels = labelings[labelings.len() / 2].clone();
            Ok((inst, labels, None))
        }
        other => usage(format!("unknown generator {other:?}")),
    }
}

fn run_trial(p: &GridPoint, trial: usize, seed: u64) -> Result<TrialResult, AppError> {
    let (inst, labels, truth) = materialize(p, seed)?;
    let mode = parse_corrupt_mode(&p.corrupt_mode)?;
    let setup = setup_oracle(&labels, truth.as_ref(), &inst, p.corrupt, mode, seed)?;
    let mut oracle = setup.oracle;
    let output = run_learner(
        &p.learner,
        &mut oracle,
        &inst,
        seed,
        p.eps,
        p.delta,
        &mut NoopObserver,
    )?;
    let (correct, error_fraction) = score(&output, &setup.reference);
    Ok(TrialResult {
        point: p.clone(),
        trial,
        seed,
        distinct_queries: oracle.distinct_queries(),
        total_calls: oracle.total_calls(),
        correct,
        error_fraction,
        status: output.status,
    })
}

pub fn cmd_bench(args: BenchArgs) -> Result<(), AppError> {
    let data = std::fs::read_to_string(&args.spec)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec: BenchSpec =
        serde_json::from_str(&data).map_err(|e| AppError::Usage(format!("bad spec: {e}")))?;
    let rows = expand(&spec)?;

    let results: Result<Vec<TrialResult>, AppError> = if args.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.parallel)
            .build()
            .map_err(|e| AppError::Internal(e.to_string()))?;
        pool.install(|| {
            rows.par_iter()
                .map(|(p, trial, seed)| run_trial(p, *trial, *seed))
                .collect()
        })
    } else {
        rows.iter().map(|(p, trial, seed)| run_trial(p, *trial, *seed)).collect()
    };
    let results = results?;

    let mut out = String::new();
    out.push_str(
        "# smf bench v1: cell,generator,learner,n,D,trial,seed,distinct_queries,total_calls,correct,error_fraction,status\n",
    );
    for r in &results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.point.cell,
            r.point.generator,
            r.point.learner,
            r.point.n,
            r.point.d,
            r.trial,
            r.seed,
            r.distinct_queries,
            r.total_calls,
            r.correct,
            r.error_fraction.map_or(String::new(), |f| format!("{f}")),
            r.status
        )
        .expect("write to string");
    }

    // Aggregate per grid point, in first-appearance order.
    out.push_str(
        "# smf bench aggregate v1: cell,generator,learner,n,D,trials,mean_queries,max_queries,success_rate\n",
    );
    let mut seen: Vec<(usize, usize, usize)> = Vec::new();
    for r in &results {
        let key = (r.point.cell, r.point.n, r.point.d);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let group: Vec<&TrialResult> = results
            .iter()
            .filter(|t| (t.point.cell, t.point.n, t.point.d) == key)
            .collect();
        let trials = group.len();
        let mean = group.iter().map(|t| t.distinct_queries).sum::<usize>() as f64
            / trials as f64;
        let max = group.iter().map(|t| t.distinct_queries).max().unwrap_or(0);
        let success = group.iter().filter(|t| t.correct).count() as f64 / trials as f64;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.point.cell,
            r.point.generator,
            r.point.learner,
            r.point.n,
            r.point.d,
            trials,
            mean,
            max,
            success
        )
        .expect("write to string");
    }

    std::fs::write(&args.out, out)
        .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(())
}
