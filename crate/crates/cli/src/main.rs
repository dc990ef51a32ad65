//! Command-line front end: solve chaining instances, run dial-a-ride
//! experiments and generate random instances.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use planchain::chainsolve::{solve_chaining_with, validate_solution, ChainError, SolveOptions};
use planchain::darp::{
    evaluate_metrics, insertion_heuristic, run_proposed, DarpError, DarpInstance, ProposedConfig,
};
use planchain::flownet::{build_network, VariantRouting};
use planchain::io::{
    generate_chain, generate_darp, load_instance, save_json, write_metrics_dir, ChainSolutionFile,
    DarpSolutionFile, FleetMode, GeneratorParams, Instance, IoError,
};
use planchain::model::{ChainingInstance, CostPolicy};
use planchain::oracle::{brute_force_optimal, OracleError};
use planchain::variantgen::generate;

#[derive(Parser)]
#[command(name = "planchain", version, about = "Exact plan chaining and batch+chain dial-a-ride")]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "PLANCHAIN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan chaining
    #[command(subcommand)]
    Chain(ChainCommand),
    /// Dial-a-ride experiments
    #[command(subcommand)]
    Darp(DarpCommand),
    /// Write a seeded random instance
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[command(flatten)]
        params: GenArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ChainCommand {
    /// Solve to optimality
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// fleet | cost | cost-waitcap:N | cost-waitpen:W (overrides the file)
        #[arg(long)]
        policy: Option<CostPolicy>,
        #[arg(long)]
        out: PathBuf,
        /// Attach undelayed connections to plan nodes directly (may yield invalid chains)
        #[arg(long)]
        literal: bool,
        /// Also write the flow network as an edge list
        #[arg(long)]
        dump_network: Option<PathBuf>,
    },
    /// Exhaustive reference solve (at most 9 plans)
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        policy: Option<CostPolicy>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DarpCommand {
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Batch length in ticks (proposed method)
        #[arg(long)]
        batch_secs: Option<i64>,
        /// Per-batch budget for the exact batch solver
        #[arg(long)]
        time_limit_ms: Option<u64>,
        /// Forbid chaining connections waiting longer than this
        #[arg(long)]
        wait_cap: Option<i64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        metrics_dir: PathBuf,
        /// Write 0 for comp_time_ms so reruns produce identical files
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Proposed,
    Ih,
    SingleBatch,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Chain,
    Darp,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of plans or requests
    #[arg(long, default_value_t = 6)]
    count: usize,
    #[arg(long, default_value_t = 6)]
    locations: usize,
    #[arg(long, default_value_t = 6)]
    grid: i64,
    #[arg(long, default_value_t = 60)]
    horizon: i64,
    #[arg(long, default_value_t = 0)]
    delay_min: i64,
    #[arg(long, default_value_t = 10)]
    delay_max: i64,
    #[arg(long, default_value_t = 0)]
    service_min: i64,
    #[arg(long, default_value_t = 4)]
    service_max: i64,
    #[arg(long, default_value_t = 4)]
    capacity: u32,
    /// Fixed fleet size
    #[arg(long, default_value_t = 3, conflicts_with = "dedicated")]
    vehicles: usize,
    /// One vehicle per plan (chain) or an on-demand fleet (darp)
    #[arg(long)]
    dedicated: bool,
    #[arg(long, default_value = "cost")]
    policy: CostPolicy,
}

/// Error with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const INFEASIBLE: u8 = 1;
const INPUT: u8 = 2;
const GUARD: u8 = 3;

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure { code, error: error.into() }
}

fn input(error: impl Into<anyhow::Error>) -> Failure {
    fail(INPUT, error)
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        input(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT);
        }
    }
    let result = match cli.command {
        Command::Chain(ChainCommand::Solve { instance, policy, out, literal, dump_network }) => {
            chain_solve(&instance, policy, &out, literal, dump_network.as_deref())
        }
        Command::Chain(ChainCommand::Oracle { instance, policy, out }) => chain_oracle(&instance, policy, out.as_deref()),
        Command::Darp(DarpCommand::Run {
            instance,
            method,
            batch_secs,
            time_limit_ms,
            wait_cap,
            out,
            metrics_dir,
            no_timing,
        }) => darp_run(&instance, method, batch_secs, time_limit_ms, wait_cap, &out, &metrics_dir, no_timing),
        Command::Gen { kind, params, out } => gen(kind, &params, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", describe(&f.error));
            ExitCode::from(f.code)
        }
    }
}

/// Joins the error chain, skipping causes the parent already printed.
fn describe(error: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in error.chain() {
        let msg = cause.to_string();
        if !out.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}

fn load_chaining(path: &Path, policy: Option<CostPolicy>) -> Result<ChainingInstance, Failure> {
    match load_instance(path)? {
        Instance::Chaining(i) => Ok(policy.map_or(i.clone(), |p| i.with_policy(p))),
        Instance::Darp(_) => Err(input(anyhow!("{}: expected plans, found requests", path.display()))),
    }
}

fn load_darp(path: &Path) -> Result<DarpInstance, Failure> {
    match load_instance(path)? {
        Instance::Darp(i) => Ok(i),
        Instance::Chaining(_) => Err(input(anyhow!("{}: expected requests, found plans", path.display()))),
    }
}

fn chain_solve(
    path: &Path,
    policy: Option<CostPolicy>,
    out: &Path,
    literal: bool,
    dump: Option<&Path>,
) -> Outcome {
    let instance = load_chaining(path, policy)?;
    let routing = if literal { VariantRouting::Literal } else { VariantRouting::Strengthened };
    if let Some(dump) = dump {
        let net = build_network(&instance, &generate(&instance), routing);
        let file = File::create(dump).with_context(|| dump.display().to_string()).map_err(input)?;
        net.write_edge_list(BufWriter::new(file)).with_context(|| dump.display().to_string()).map_err(input)?;
    }
    let opts = SolveOptions { routing, ..SolveOptions::new() };
    let (solution, _) = solve_chaining_with(&instance, &opts).map_err(|e| match e {
        ChainError::Infeasible(_) => fail(INFEASIBLE, e),
        ChainError::Model(_) => input(e),
        ChainError::Malformed(_) => fail(INFEASIBLE, e),
    })?;
    let report = validate_solution(&instance, &solution);
    if !report.is_valid() {
        return Err(fail(INFEASIBLE, anyhow!("solution rejected by the validator: {:?}", report.violations)));
    }
    save_json(out, &ChainSolutionFile::new(instance.policy(), &solution))?;
    println!(
        "objective {} with {} chains ({} branch nodes, {:.1?})",
        solution.objective,
        solution.chains.len(),
        solution.stats.branch_nodes,
        solution.stats.wall_time
    );
    Ok(())
}

fn chain_oracle(path: &Path, policy: Option<CostPolicy>, out: Option<&Path>) -> Outcome {
    let instance = load_chaining(path, policy)?;
    let result = brute_force_optimal(&instance).map_err(|e| match e {
        OracleError::TooManyPlans { .. } | OracleError::TooManyVariants { .. } => fail(GUARD, e),
        e => input(e),
    })?;
    let Some(objective) = result.objective else {
        return Err(fail(INFEASIBLE, anyhow!("no feasible chaining exists")));
    };
    println!("objective {objective} ({} feasible chain sets)", result.feasible_sets);
    if let Some(out) = out {
        let solution = planchain::chainsolve::ChainSolution {
            chains: result.witness,
            objective,
            stats: Default::default(),
        };
        let report = validate_solution(&instance, &solution);
        if !report.is_valid() {
            return Err(fail(INFEASIBLE, anyhow!("witness rejected by the validator: {:?}", report.violations)));
        }
        save_json(out, &ChainSolutionFile::new(instance.policy(), &solution))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn darp_run(
    path: &Path,
    method: Method,
    batch_secs: Option<i64>,
    time_limit_ms: Option<u64>,
    wait_cap: Option<i64>,
    out: &Path,
    metrics_dir: &Path,
    no_timing: bool,
) -> Outcome {
    let instance = load_darp(path)?;
    let darp_failure = |e: DarpError| match e {
        DarpError::BatchTooLarge { .. } | DarpError::GroupTooLarge { .. } => fail(GUARD, e),
        DarpError::FleetExhausted(_) | DarpError::Chaining { .. } => fail(INFEASIBLE, e),
        e => input(e),
    };
    let started = Instant::now();
    let (solution, batch_len) = match method {
        Method::Ih => (insertion_heuristic(&instance).map_err(darp_failure)?, None),
        Method::Proposed | Method::SingleBatch => {
            let mut config = match (method, batch_secs) {
                (Method::SingleBatch, _) => ProposedConfig::single_batch(&instance),
                (_, Some(b)) => ProposedConfig::new(b),
                (_, None) => return Err(input(anyhow!("--batch-secs is required for the proposed method"))),
            };
            config.time_limit = time_limit_ms.map(Duration::from_millis);
            config.wait_cap = wait_cap;
            let mut solution = run_proposed(&instance, &config).map_err(darp_failure)?;
            if matches!(method, Method::SingleBatch) {
                solution.method = solution.method.replacen("proposed", "single-batch", 1);
            }
            (solution, Some(config.batch_len))
        }
    };
    let elapsed = if no_timing { 0 } else { started.elapsed().as_millis() };
    let metrics = evaluate_metrics(&solution, &instance).map_err(|e| fail(INFEASIBLE, e))?;
    save_json(out, &DarpSolutionFile::new(&solution))?;
    write_metrics_dir(metrics_dir, &solution.method, batch_len, &metrics, elapsed)?;
    println!(
        "{}: total cost {}, {} vehicles, {} ms",
        solution.method, metrics.total_cost, metrics.used_vehicles, elapsed
    );
    Ok(())
}

fn gen(kind: GenKind, a: &GenArgs, out: &Path) -> Outcome {
    if a.delay_min > a.delay_max || a.service_min > a.service_max || a.delay_min < 0 || a.service_min < 0 {
        return Err(input(anyhow!("ranges must be non-negative with min <= max")));
    }
    if a.horizon < 0 || a.grid < 1 || a.capacity == 0 {
        return Err(input(anyhow!("horizon must be >= 0, grid >= 1 and capacity >= 1")));
    }
    let params = GeneratorParams {
        seed: a.seed,
        locations: a.locations,
        grid: a.grid,
        horizon: a.horizon,
        count: a.count,
        delay: (a.delay_min, a.delay_max),
        service: (a.service_min, a.service_max),
        capacity: a.capacity,
        fleet: if a.dedicated { FleetMode::Dedicated } else { FleetMode::Fixed(a.vehicles) },
        policy: a.policy,
    };
    let file = match kind {
        GenKind::Chain => generate_chain(&params),
        GenKind::Darp => generate_darp(&params),
    };
    save_json(out, &file)?;
    Ok(())
}
