//! Command-line front end for running evolution experiments and analyzing
//! their records.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use evolearn_core::algorithms::Algo;
use evolearn_core::harness::{
    self, control_popsize_spec, emit_curves, load_records, parse_selector, record_to_json,
    summarize, write_curves_csv, write_pairs_csv, write_summary_csv, ExperimentSpec, Metric,
    RunRecord, TaskId,
};

#[derive(Parser)]
#[command(
    name = "evolearn",
    version,
    about = "Evolve circuit and pole-balancing controllers and analyze the runs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a parameter sweep and write records.jsonl
    Run(RunArgs),
    /// Aggregate records into a per-grid-point CSV table
    Summarize(SummarizeArgs),
    /// Mann-Whitney comparison between two record selections
    Compare(CompareArgs),
    /// Aggregate learning curves with bootstrap intervals
    Curves(CurvesArgs),
    /// Run the fixed population-size control design and report the
    /// size/fitness rank correlation
    ControlPopsize(ControlPopsizeArgs),
}

fn task_parser(s: &str) -> Result<TaskId, String> {
    TaskId::parse(s).ok_or_else(|| format!("unknown task {s:?} (parity, dpole-fixed, dpole-random)"))
}

fn algo_parser(s: &str) -> Result<Algo, String> {
    Algo::parse(s).ok_or_else(|| format!("unknown algorithm {s:?} (sss, hc, ssshc)"))
}

fn metric_parser(s: &str) -> Result<Metric, String> {
    Metric::parse(s)
}

#[derive(Args)]
struct RunArgs {
    /// Task: parity, dpole-fixed, or dpole-random
    #[arg(long, value_parser = task_parser)]
    task: TaskId,
    /// Algorithm: sss, hc, or ssshc
    #[arg(long, value_parser = algo_parser)]
    algo: Algo,
    /// Mutation rate grid (comma-separated)
    #[arg(long = "mut-rate", value_delimiter = ',', required = true)]
    mut_rate: Vec<f64>,
    /// Population size grid (comma-separated)
    #[arg(long = "pop-size", value_delimiter = ',', required = true)]
    pop_size: Vec<usize>,
    /// Selection-noise half-range grid (comma-separated)
    #[arg(long, value_delimiter = ',', default_value = "0")]
    noise: Vec<f64>,
    /// Learning-iterations grid (comma-separated; used by ssshc)
    #[arg(long = "learn-iters", value_delimiter = ',', default_value = "0")]
    learn_iters: Vec<u64>,
    /// Replications per grid point
    #[arg(long, default_value_t = 1)]
    replications: u64,
    /// Evaluation budget per run, in simulator steps
    #[arg(long = "max-steps")]
    max_steps: u64,
    /// Base seed; per-run seeds derive from it and the grid point
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for records.jsonl
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Records directory or records.jsonl path
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Threshold whose steps-to-crossing is aggregated
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

#[derive(Args)]
struct CompareArgs {
    /// First group: PATH or PATH@key=value,... (keys: task, algo, mut,
    /// pop, noise, learn, rep)
    #[arg(long)]
    a: String,
    /// Second group, same syntax
    #[arg(long)]
    b: String,
    /// Bonferroni family size
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Metric: final, steps:<threshold>, or generalization
    #[arg(long, value_parser = metric_parser, default_value = "final")]
    metric: Metric,
}

#[derive(Args)]
struct CurvesArgs {
    /// Records directory or records.jsonl path
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of points on the common step axis
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ControlPopsizeArgs {
    /// Output directory (records.jsonl, pairs.csv)
    #[arg(long)]
    out: PathBuf,
    /// Base seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Evaluation budget per run, in simulator steps
    #[arg(long = "max-steps", default_value_t = 50_000_000)]
    max_steps: u64,
    /// Replications per population size
    #[arg(long, default_value_t = 5)]
    replications: u64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(args) => run(args),
        Cmd::Summarize(args) => do_summarize(args),
        Cmd::Compare(args) => do_compare(args),
        Cmd::Curves(args) => do_curves(args),
        Cmd::ControlPopsize(args) => control_popsize(args),
    }
}

/// Runs the cells of `spec`, honoring an optional worker-thread limit.
fn execute(spec: &ExperimentSpec, jobs: Option<usize>) -> Vec<RunRecord> {
    match jobs {
        Some(n) => harness::run_experiment_with_jobs(spec, n),
        None => harness::run_experiment(spec),
    }
}

/// Opens `<dir>/records.jsonl` for writing, creating the directory. Called
/// before any computation so an unwritable destination fails fast.
fn open_records(dir: &PathBuf) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join("records.jsonl");
    let file = std::fs::File::create(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(std::io::BufWriter::new(file))
}

fn write_all(mut out: impl Write, records: &[RunRecord]) -> Result<()> {
    for r in records {
        writeln!(out, "{}", record_to_json(r))?;
    }
    out.flush()?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let spec = ExperimentSpec {
        task: args.task,
        algo: args.algo,
        mut_rates: args.mut_rate,
        pop_sizes: args.pop_size,
        noise_ranges: args.noise,
        learn_iters: args.learn_iters,
        replications: args.replications,
        base_seed: args.seed,
        max_steps: args.max_steps,
        thresholds: evolearn_core::algorithms::AlgoConfig::default_thresholds(),
    };
    let out = open_records(&args.out)?;
    let records = execute(&spec, args.jobs);
    write_all(out, &records)?;
    println!(
        "wrote {} records to {}",
        records.len(),
        args.out.join("records.jsonl").display()
    );
    Ok(())
}

fn do_summarize(args: SummarizeArgs) -> Result<()> {
    let records = load_records(&args.input)
        .with_context(|| format!("cannot load records from {}", args.input.display()))?;
    if records.is_empty() {
        bail!("no records in {}", args.input.display());
    }
    let rows = summarize(&records, args.threshold);
    write_summary_csv(&args.out, &rows)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn do_compare(args: CompareArgs) -> Result<()> {
    let load_group = |selector: &str| -> Result<Vec<RunRecord>> {
        let (path, filter) = parse_selector(selector).map_err(anyhow::Error::msg)?;
        let records = load_records(&path)
            .with_context(|| format!("cannot load records from {}", path.display()))?;
        let hits: Vec<RunRecord> = filter.apply(&records).into_iter().cloned().collect();
        if hits.is_empty() {
            bail!("selector {selector:?} matches no records");
        }
        Ok(hits)
    };
    let a = load_group(&args.a)?;
    let b = load_group(&args.b)?;
    let out = harness::compare(&a, &b, args.m, args.metric);
    println!(
        "U = {}, p = {:.6e}, p_adjusted = {:.6e} (m = {}, n_a = {}, n_b = {})",
        out.statistic, out.p_raw, out.p_adjusted, args.m, out.n_a, out.n_b
    );
    Ok(())
}

fn do_curves(args: CurvesArgs) -> Result<()> {
    let records = load_records(&args.input)
        .with_context(|| format!("cannot load records from {}", args.input.display()))?;
    if records.is_empty() {
        bail!("no records in {}", args.input.display());
    }
    let points = emit_curves(&records, args.points);
    write_curves_csv(&args.out, &points)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!("wrote {} points to {}", points.len(), args.out.display());
    Ok(())
}

fn control_popsize(args: ControlPopsizeArgs) -> Result<()> {
    let spec = control_popsize_spec(args.seed, args.max_steps, args.replications);
    let out = open_records(&args.out)?;
    let records = execute(&spec, args.jobs);
    write_all(out, &records)?;

    let pairs = harness::popsize_fitness_pairs(&records);
    write_pairs_csv(&args.out.join("pairs.csv"), &pairs)?;
    let r = harness::control_popsize_correlation(&records);
    println!(
        "spearman rho = {:.6}, p = {:.6e} over {} (population size, fitness) pairs",
        r.statistic,
        r.p_value,
        pairs.len()
    );
    Ok(())
}
