//! `smf`: generate instances, run learners against query-counted oracles,
//! and produce query-complexity benchmark tables.
//!
//! Exit codes: 0 on success (including probabilistic-failure and
//! not-realizable run records), 2 on usage or input errors, 1 on an
//! internal invariant breach.

mod bench;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shuffled_monotone::generators::{
    gen_circle_instance, gen_depth_two_hard, gen_random_shuffled, gen_star_instance,
    GeneratorMetadata,
};
use shuffled_monotone::geometry::{project_to_instance, DirectionSet, PointSet};
use shuffled_monotone::instance::PlantedTruth;
use shuffled_monotone::io::{save_instance, InstanceFile, PlantedBlock};

#[derive(Parser)]
#[command(name = "smf", version, about = "Shuffled-monotone learning harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a learner against an instance file and print a run record.
    Learn(run::LearnArgs),
    /// Run a benchmark suite and write CSV tables.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator: random | circle | star | depth-two
    generator: String,
    /// Element count (random, circle).
    #[arg(long)]
    n: Option<usize>,
    /// Permutation count (random).
    #[arg(long = "D")]
    big_d: Option<usize>,
    /// Stump dimension (star).
    #[arg(long)]
    d: Option<usize>,
    /// Half-width of the diagonal point set (depth-two).
    #[arg(long)]
    m: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the instance JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Internal(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "{m}"),
            AppError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, AppError> {
    Err(AppError::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Learn(args) => run::cmd_learn(args),
        Cmd::Bench(args) => bench::cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), AppError> {
    let file = build_instance_file(&args)?;
    save_instance(&args.out, &file)
        .map_err(|e| AppError::Usage(format!("cannot write {}: {e}", args.out.display())))
}

fn build_instance_file(args: &GenArgs) -> Result<InstanceFile, AppError> {
    match args.generator.as_str() {
        "random" => {
            let n = args.n.ok_or(AppError::Usage("gen random requires --n".into()))?;
            let d = args
                .big_d
                .ok_or(AppError::Usage("gen random requires --D".into()))?;
            if n == 0 || d == 0 {
                return usage("--n and --D must be positive");
            }
            let g = gen_random_shuffled(n, d, args.seed);
            Ok(InstanceFile::from_generated(&g))
        }
        "circle" => {
            let n = args.n.ok_or(AppError::Usage("gen circle requires --n".into()))?;
            if n < 3 {
                return usage("gen circle requires --n >= 3");
            }
            let (points, hyps) = gen_circle_instance(n);
            let directions =
                DirectionSet::new(hyps.iter().map(|h| h.direction.clone()).collect())
                    .map_err(internal)?;
            // The planted labeling is f_0's: only the point of maximal
            // projection onto direction 1 is labeled 1.
            geometry_file(
                points,
                directions,
                n,
                "circle",
                vec![("n".into(), n.to_string())],
                args.seed,
            )
        }
        "star" => {
            let d = args.d.ok_or(AppError::Usage("gen star requires --d".into()))?;
            if d == 0 {
                return usage("--d must be positive");
            }
            let (points, _) = gen_star_instance(d);
            let axes = (0..d)
                .map(|i| {
                    let mut u = vec![0.0; d];
                    u[i] = 1.0;
                    u
                })
                .collect();
            let directions = DirectionSet::new(axes).map_err(internal)?;
            // Planted labeling is the base stump 1(x_1 > 0): the d "plus"
            // points, i.e. the top d ranks of direction 1.
            geometry_file(
                points,
                directions,
                d + 1,
                "star",
                vec![("d".into(), d.to_string())],
                args.seed,
            )
        }
        "depth-two" => {
            let m = args.m.ok_or(AppError::Usage("gen depth-two requires --m".into()))?;
            if m < 1 {
                return usage("--m must be at least 1");
            }
            let (points, labelings) = gen_depth_two_hard(m);
            let directions =
                DirectionSet::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).map_err(internal)?;
            let middle = labelings[labelings.len() / 2].clone();
            Ok(InstanceFile {
                n: points.len(),
                d: 2,
                mode: "geometry".into(),
                permutations: None,
                points: Some(points.points().to_vec()),
                directions: Some(directions.directions().to_vec()),
                labels: middle.iter().map(|&b| b as u8).collect(),
                planted: Some(PlantedBlock {
                    monotone_index: None,
                    boundary_low: None,
                    boundary_high: None,
                }),
                metadata: Some(GeneratorMetadata {
                    generator: "depth-two".into(),
                    params: vec![("m".into(), m.to_string())],
                    seed: args.seed,
                }),
            })
        }
        other => usage(format!("unknown generator {other:?}")),
    }
}

/// Builds a geometry-mode file whose planted labeling is the threshold
/// hypothesis (direction 1, rank `jstar`) of the derived instance.
fn geometry_file(
    points: PointSet,
    directions: DirectionSet,
    jstar: usize,
    name: &str,
    params: Vec<(String, String)>,
    seed: u64,
) -> Result<InstanceFile, AppError> {
    let inst = project_to_instance(&points, &directions).map_err(internal)?;
    let truth = PlantedTruth::from_hypothesis(&inst, 1, jstar).map_err(internal)?;
    Ok(InstanceFile {
        n: inst.n(),
        d: inst.num_directions(),
        mode: "geometry".into(),
        permutations: None,
        points: Some(points.points().to_vec()),
        directions: Some(directions.directions().to_vec()),
        labels: truth.labeling.iter().map(|&b| b as u8).collect(),
        planted: Some(PlantedBlock {
            monotone_index: truth.monotone_index,
            boundary_low: truth.boundary_low,
            boundary_high: truth.boundary_high,
        }),
        metadata: Some(GeneratorMetadata { generator: name.into(), params, seed }),
    })
}

fn internal(e: impl std::fmt::Display) -> AppError {
    AppError::Internal(e.to_string())
}
