//! Experiment orchestration: parameter sweeps with replication, durable
//! run records, summary tables, pairwise comparisons, learning-curve
//! extraction, and the population-size control design.
//!
//! Every run's seed derives from a stable hash of the base seed and the
//! full parameter tuple, so grid points are independently rerunnable and a
//! whole experiment is reproducible byte for byte. Records are stored as
//! JSON Lines with floats printed at 17 significant digits (lossless for
//! f64).

use std::collections::BTreeSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{Algo, AlgoConfig, RunLog};
use crate::cartpole::DoublePoleTask;
use crate::circuits::ParityTask;
use crate::genome::IntGenotype;
use crate::rng::{self, SeedMix};
use crate::stats::{self, TestResult, DEFAULT_BOOTSTRAP_RESAMPLES};
use crate::task::Task;

/// Current `records.jsonl` schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Maximum persisted curve points per run; longer runs are thinned
/// uniformly in cumulative steps.
pub const MAX_CURVE_POINTS: usize = 2000;

/// The benchmark tasks an experiment can target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskId {
    #[serde(rename = "parity")]
    Parity,
    #[serde(rename = "dpole-fixed")]
    DpoleFixed,
    #[serde(rename = "dpole-random")]
    DpoleRandom,
}

impl TaskId {
    pub const ALL: [TaskId; 3] = [TaskId::Parity, TaskId::DpoleFixed, TaskId::DpoleRandom];

    pub fn name(self) -> &'static str {
        match self {
            TaskId::Parity => "parity",
            TaskId::DpoleFixed => "dpole-fixed",
            TaskId::DpoleRandom => "dpole-random",
        }
    }

    pub fn parse(s: &str) -> Option<TaskId> {
        match s {
            "parity" => Some(TaskId::Parity),
            "dpole-fixed" => Some(TaskId::DpoleFixed),
            "dpole-random" => Some(TaskId::DpoleRandom),
            _ => None,
        }
    }

    /// Instantiates the task. Cheap; callers may build one per worker.
    pub fn build(self) -> Box<dyn Task> {
        match self {
            TaskId::Parity => Box::new(ParityTask::new()),
            TaskId::DpoleFixed => Box::new(DoublePoleTask::fixed()),
            TaskId::DpoleRandom => Box::new(DoublePoleTask::random()),
        }
    }
}

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A full sweep: the cross product of the parameter grids, replicated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub task: TaskId,
    pub algo: Algo,
    pub mut_rates: Vec<f64>,
    pub pop_sizes: Vec<usize>,
    pub noise_ranges: Vec<f64>,
    pub learn_iters: Vec<u64>,
    pub replications: u64,
    pub base_seed: u64,
    pub max_steps: u64,
    pub thresholds: Vec<f64>,
}

impl ExperimentSpec {
    /// Single-point convenience constructor. One positional argument per
    /// grid dimension is the point: callers pin the whole tuple at once.
    #[allow(clippy::too_many_arguments)]
    pub fn single(
        task: TaskId,
        algo: Algo,
        mut_rate: f64,
        pop_size: usize,
        noise_range: f64,
        learn_iters: u64,
        replications: u64,
        base_seed: u64,
        max_steps: u64,
    ) -> Self {
        ExperimentSpec {
            task,
            algo,
            mut_rates: vec![mut_rate],
            pop_sizes: vec![pop_size],
            noise_ranges: vec![noise_range],
            learn_iters: vec![learn_iters],
            replications,
            base_seed,
            max_steps,
            thresholds: AlgoConfig::default_thresholds(),
        }
    }

    fn validate(&self) {
        assert!(!self.mut_rates.is_empty(), "mutation-rate grid is empty");
        assert!(!self.pop_sizes.is_empty(), "population-size grid is empty");
        assert!(!self.noise_ranges.is_empty(), "noise grid is empty");
        assert!(!self.learn_iters.is_empty(), "learning-iterations grid is empty");
        assert!(self.replications >= 1, "need at least one replication");
    }

    /// All runs in canonical order: mutation rate, then population size,
    /// then noise, then learning iterations, then replication index.
    pub fn cells(&self) -> Vec<Cell> {
        self.validate();
        let mut cells = Vec::new();
        for &mut_rate in &self.mut_rates {
            for &pop_size in &self.pop_sizes {
                for &noise_range in &self.noise_ranges {
                    for &learn_iters in &self.learn_iters {
                        for replication in 0..self.replications {
                            cells.push(Cell {
                                task: self.task,
                                algo: self.algo,
                                params: ParamTuple {
                                    mut_rate,
                                    pop_size,
                                    noise_range,
                                    learn_iters,
                                    max_steps: self.max_steps,
                                },
                                replication,
                                seed: run_seed(
                                    self.base_seed,
                                    self.task,
                                    self.algo,
                                    mut_rate,
                                    pop_size,
                                    noise_range,
                                    learn_iters,
                                    replication,
                                ),
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

/// One grid point × replication, fully seeded.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub task: TaskId,
    pub algo: Algo,
    pub params: ParamTuple,
    pub replication: u64,
    pub seed: u64,
}

/// The parameters identifying a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamTuple {
    pub mut_rate: f64,
    pub pop_size: usize,
    pub noise_range: f64,
    pub learn_iters: u64,
    pub max_steps: u64,
}

/// Stable per-run seed from the base seed and the full parameter tuple.
#[allow(clippy::too_many_arguments)]
pub fn run_seed(
    base_seed: u64,
    task: TaskId,
    algo: Algo,
    mut_rate: f64,
    pop_size: usize,
    noise_range: f64,
    learn_iters: u64,
    replication: u64,
) -> u64 {
    SeedMix::new()
        .u64(base_seed)
        .str(task.name())
        .str(algo.name())
        .f64(mut_rate)
        .u64(pop_size as u64)
        .f64(noise_range)
        .u64(learn_iters)
        .u64(replication)
        .finish()
}

/// Durable record of one run. The genotype and per-individual fitness of
/// the final population stay in memory only (they feed the generalization
/// re-evaluation and the population-size control) and are not serialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub task: TaskId,
    pub algo: Algo,
    pub params: ParamTuple,
    pub replication: u64,
    pub seed: u64,
    /// Best-ever true fitness reached at a generation boundary.
    pub final_fitness: f64,
    /// `[threshold, cumulative steps at first crossing]` pairs; censored
    /// runs carry the step budget.
    pub steps_to: Vec<(f64, u64)>,
    /// `[cumulative steps, best-ever true fitness]` per logged generation,
    /// thinned to at most [`MAX_CURVE_POINTS`] points.
    pub curve: Vec<(u64, f64)>,
    /// Fixed-protocol fitness of the best genotype; present only for runs
    /// on the random-initial-states task.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generalization_fitness: Option<f64>,
    #[serde(skip)]
    pub best_genes: Vec<i32>,
    #[serde(skip)]
    pub final_population_fitness: Vec<f64>,
}

impl RunRecord {
    /// Steps at first crossing of `threshold`, if it was configured.
    pub fn steps_to(&self, threshold: f64) -> Option<u64> {
        self.steps_to
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, s)| *s)
    }
}

/// Best-ever curve at generation boundaries, thinned uniformly in steps to
/// at most `max_points`, always keeping the first and last boundary.
fn downsample_curve(log: &RunLog, max_points: usize) -> Vec<(u64, f64)> {
    let mut full = Vec::with_capacity(log.generations.len());
    let mut best = f64::NEG_INFINITY;
    for rec in &log.generations {
        best = best.max(rec.best);
        full.push((rec.cum_steps, best));
    }
    if full.len() <= max_points {
        return full;
    }
    let first = full[0].0 as f64;
    let last = full[full.len() - 1].0 as f64;
    let mut picked = Vec::with_capacity(max_points);
    let mut cursor = 0usize;
    for k in 0..max_points {
        let target = first + (last - first) * k as f64 / (max_points - 1) as f64;
        while cursor + 1 < full.len() && (full[cursor + 1].0 as f64) <= target {
            cursor += 1;
        }
        if picked.last() != Some(&full[cursor]) {
            picked.push(full[cursor]);
        }
    }
    if picked.last() != Some(&full[full.len() - 1]) {
        picked.push(full[full.len() - 1]);
    }
    picked
}

/// Executes one cell and assembles its record.
fn run_cell(cell: &Cell) -> RunRecord {
    let task = cell.task.build();
    let cfg = AlgoConfig {
        n_parents: cell.params.pop_size,
        mut_rate: cell.params.mut_rate,
        noise_range: cell.params.noise_range,
        n_learn_iters: cell.params.learn_iters,
        max_steps: cell.params.max_steps,
        seed: cell.seed,
        thresholds: AlgoConfig::default_thresholds(),
    };
    let log = cell.algo.run(&*task, &cfg);
    let generalization_fitness = match cell.task {
        TaskId::DpoleRandom => Some(generalization_eval(&log.best_genotype)),
        _ => None,
    };
    RunRecord {
        schema_version: SCHEMA_VERSION,
        task: cell.task,
        algo: cell.algo,
        params: cell.params,
        replication: cell.replication,
        seed: cell.seed,
        final_fitness: log.best_fitness,
        steps_to: log.threshold_steps.clone(),
        curve: downsample_curve(&log, MAX_CURVE_POINTS),
        generalization_fitness,
        best_genes: log.best_genotype.genes().to_vec(),
        final_population_fitness: log.final_population_fitness,
    }
}

/// Re-evaluates a controller genotype under the deterministic
/// fixed-initial-states protocol.
pub fn generalization_eval(genotype: &IntGenotype) -> f64 {
    let task = DoublePoleTask::fixed();
    assert_eq!(
        genotype.len(),
        task.bounds().len(),
        "generalization re-evaluation needs a controller genotype"
    );
    // the fixed protocol never touches the rng
    task.evaluate(genotype, &mut rng::from_seed(0)).fitness
}

/// Runs every cell of the sweep. Cells execute in parallel on the current
/// rayon pool; the returned order is canonical regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Vec<RunRecord> {
    let cells = spec.cells();
    cells.par_iter().map(run_cell).collect()
}

/// Like [`run_experiment`] but on a dedicated pool of `jobs` threads.
pub fn run_experiment_with_jobs(spec: &ExperimentSpec, jobs: usize) -> Vec<RunRecord> {
    assert!(jobs >= 1, "need at least one worker");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| run_experiment(spec))
}

/// JSON serializer that prints every float with 17 significant digits so
/// values survive a round trip exactly.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// One record as a single JSON line (no trailing newline).
pub fn record_to_json(record: &RunRecord) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    record
        .serialize(&mut ser)
        .expect("record serialization cannot fail");
    String::from_utf8(buf).expect("serialized JSON is UTF-8")
}

/// Writes `records.jsonl` under `dir` (created if needed); returns its path.
pub fn write_records(dir: &Path, records: &[RunRecord]) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("records.jsonl");
    let mut out = BufWriter::new(std::fs::File::create(&path)?);
    for r in records {
        writeln!(out, "{}", record_to_json(r))?;
    }
    out.flush()?;
    Ok(path)
}

/// Loads records from a `records.jsonl` file, or from `<dir>/records.jsonl`
/// when given a directory.
pub fn load_records(path: &Path) -> std::io::Result<Vec<RunRecord>> {
    let file = if path.is_dir() {
        path.join("records.jsonl")
    } else {
        path.to_path_buf()
    };
    let reader = std::io::BufReader::new(std::fs::File::open(&file)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}:{}: {e}", file.display(), i + 1),
            )
        })?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!(
                    "{}:{}: unsupported schema version {}",
                    file.display(),
                    i + 1,
                    record.schema_version
                ),
            ));
        }
        records.push(record);
    }
    Ok(records)
}

/// One summary table row: a grid point's aggregate over replications. The
/// SD columns use the population convention (divide by n).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub task: TaskId,
    pub algo: Algo,
    pub mut_rate: f64,
    pub pop_size: usize,
    pub noise_range: f64,
    pub learn_iters: u64,
    pub n: usize,
    pub mean_fitness: f64,
    pub fitness_sd_pop: f64,
    pub threshold: f64,
    pub mean_steps_to: f64,
    pub steps_sd_pop: f64,
}

fn mean_and_pop_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups records by grid point (first-appearance order) and aggregates
/// final fitness and steps-to-`threshold`.
pub fn summarize(records: &[RunRecord], threshold: f64) -> Vec<SummaryRow> {
    assert!(!records.is_empty(), "nothing to summarize");
    let mut groups: Vec<(Vec<f64>, Vec<f64>, &RunRecord)> = Vec::new();
    let mut index: Vec<(TaskId, Algo, ParamTuple)> = Vec::new();
    for r in records {
        let key = (r.task, r.algo, r.params);
        let slot = index.iter().position(|k| {
            k.0 == key.0
                && k.1 == key.1
                && k.2.mut_rate == key.2.mut_rate
                && k.2.pop_size == key.2.pop_size
                && k.2.noise_range == key.2.noise_range
                && k.2.learn_iters == key.2.learn_iters
                && k.2.max_steps == key.2.max_steps
        });
        let slot = match slot {
            Some(i) => i,
            None => {
                index.push(key);
                groups.push((Vec::new(), Vec::new(), r));
                groups.len() - 1
            }
        };
        groups[slot].0.push(r.final_fitness);
        let steps = r.steps_to(threshold).unwrap_or_else(|| {
            panic!(
                "record (task {}, algo {}, replication {}) has no threshold {threshold}",
                r.task, r.algo, r.replication
            )
        });
        groups[slot].1.push(steps as f64);
    }
    groups
        .iter()
        .map(|(fits, steps, sample)| {
            let (mean_fitness, fitness_sd_pop) = mean_and_pop_sd(fits);
            let (mean_steps_to, steps_sd_pop) = mean_and_pop_sd(steps);
            SummaryRow {
                task: sample.task,
                algo: sample.algo,
                mut_rate: sample.params.mut_rate,
                pop_size: sample.params.pop_size,
                noise_range: sample.params.noise_range,
                learn_iters: sample.params.learn_iters,
                n: fits.len(),
                mean_fitness,
                fitness_sd_pop,
                threshold,
                mean_steps_to,
                steps_sd_pop,
            }
        })
        .collect()
}

/// Writes summary rows as CSV (column names carry the SD convention).
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// Which per-record scalar a comparison tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// Best true fitness of the run.
    FinalFitness,
    /// Steps to first crossing of the given threshold (budget if censored).
    StepsTo(f64),
    /// Fixed-protocol fitness of the best genotype (random-task runs only).
    Generalization,
}

impl Metric {
    pub fn parse(s: &str) -> Result<Metric, String> {
        if s == "final" {
            return Ok(Metric::FinalFitness);
        }
        if s == "generalization" {
            return Ok(Metric::Generalization);
        }
        if let Some(t) = s.strip_prefix("steps:") {
            let t: f64 = t
                .parse()
                .map_err(|_| format!("bad threshold in metric {s:?}"))?;
            return Ok(Metric::StepsTo(t));
        }
        Err(format!(
            "unknown metric {s:?} (expected final, generalization, or steps:<threshold>)"
        ))
    }

    pub fn extract(self, r: &RunRecord) -> f64 {
        match self {
            Metric::FinalFitness => r.final_fitness,
            Metric::StepsTo(t) => r
                .steps_to(t)
                .unwrap_or_else(|| panic!("record has no threshold {t}"))
                as f64,
            Metric::Generalization => r
                .generalization_fitness
                .expect("record has no generalization fitness (not a random-task run)"),
        }
    }
}

/// Result of a Bonferroni-adjusted Mann-Whitney comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareOutcome {
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Mann-Whitney U on `metric` between two record groups, with the p-value
/// Bonferroni-adjusted for `m` planned comparisons.
pub fn compare(a: &[RunRecord], b: &[RunRecord], m: usize, metric: Metric) -> CompareOutcome {
    let va: Vec<f64> = a.iter().map(|r| metric.extract(r)).collect();
    let vb: Vec<f64> = b.iter().map(|r| metric.extract(r)).collect();
    let TestResult { statistic, p_value } = stats::mann_whitney_u(&va, &vb);
    CompareOutcome {
        statistic,
        p_raw: p_value,
        p_adjusted: stats::bonferroni(&[p_value], m.max(1))[0],
        n_a: va.len(),
        n_b: vb.len(),
    }
}

/// Record filter for selecting comparison groups out of a record file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Filter {
    pub task: Option<TaskId>,
    pub algo: Option<Algo>,
    pub mut_rate: Option<f64>,
    pub pop_size: Option<usize>,
    pub noise_range: Option<f64>,
    pub learn_iters: Option<u64>,
    pub replication: Option<u64>,
}

impl Filter {
    pub fn matches(&self, r: &RunRecord) -> bool {
        self.task.is_none_or(|v| r.task == v)
            && self.algo.is_none_or(|v| r.algo == v)
            && self.mut_rate.is_none_or(|v| r.params.mut_rate == v)
            && self.pop_size.is_none_or(|v| r.params.pop_size == v)
            && self.noise_range.is_none_or(|v| r.params.noise_range == v)
            && self.learn_iters.is_none_or(|v| r.params.learn_iters == v)
            && self.replication.is_none_or(|v| r.replication == v)
    }

    pub fn apply<'a>(&self, records: &'a [RunRecord]) -> Vec<&'a RunRecord> {
        records.iter().filter(|r| self.matches(r)).collect()
    }
}

/// Parses a selector of the form `PATH` or `PATH@key=value,key=value,...`.
///
/// Keys: `task`, `algo`, `mut`, `pop`, `noise`, `learn`, `rep`.
pub fn parse_selector(s: &str) -> Result<(PathBuf, Filter), String> {
    let (path, spec) = match s.split_once('@') {
        Some((p, f)) => (p, Some(f)),
        None => (s, None),
    };
    if path.is_empty() {
        return Err(format!("selector {s:?} has an empty path"));
    }
    let mut filter = Filter::default();
    if let Some(spec) = spec {
        for part in spec.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("selector clause {part:?} is not key=value"))?;
            match key {
                "task" => {
                    filter.task =
                        Some(TaskId::parse(value).ok_or_else(|| format!("unknown task {value:?}"))?)
                }
                "algo" => {
                    filter.algo =
                        Some(Algo::parse(value).ok_or_else(|| format!("unknown algo {value:?}"))?)
                }
                "mut" => {
                    filter.mut_rate =
                        Some(value.parse().map_err(|_| format!("bad mut value {value:?}"))?)
                }
                "pop" => {
                    filter.pop_size =
                        Some(value.parse().map_err(|_| format!("bad pop value {value:?}"))?)
                }
                "noise" => {
                    filter.noise_range = Some(
                        value
                            .parse()
                            .map_err(|_| format!("bad noise value {value:?}"))?,
                    )
                }
                "learn" => {
                    filter.learn_iters = Some(
                        value
                            .parse()
                            .map_err(|_| format!("bad learn value {value:?}"))?,
                    )
                }
                "rep" => {
                    filter.replication =
                        Some(value.parse().map_err(|_| format!("bad rep value {value:?}"))?)
                }
                _ => return Err(format!("unknown selector key {key:?}")),
            }
        }
    }
    Ok((PathBuf::from(path), filter))
}

/// One point of an aggregated learning curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub steps: u64,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Value of a best-ever step curve at cumulative step `s` (the last
/// boundary at or before `s`; curves extend right with their final value).
fn curve_value_at(curve: &[(u64, f64)], s: u64) -> f64 {
    match curve.iter().rev().find(|(steps, _)| *steps <= s) {
        Some((_, v)) => *v,
        None => curve[0].1,
    }
}

/// Resamples every record's curve onto a common `n_points` step axis and
/// aggregates across records: mean and 85% percentile-bootstrap interval.
pub fn emit_curves(records: &[RunRecord], n_points: usize) -> Vec<CurvePoint> {
    assert!(!records.is_empty(), "no records to aggregate");
    assert!(n_points >= 1, "need at least one curve point");
    assert!(
        records.iter().all(|r| !r.curve.is_empty()),
        "records must carry curves"
    );
    let start = records.iter().map(|r| r.curve[0].0).max().unwrap();
    let end = records
        .iter()
        .map(|r| r.curve.last().unwrap().0)
        .max()
        .unwrap()
        .max(start);

    let mut axis: BTreeSet<u64> = BTreeSet::new();
    if n_points == 1 {
        axis.insert(end);
    } else {
        for k in 0..n_points {
            let t = start as f64 + (end - start) as f64 * k as f64 / (n_points - 1) as f64;
            axis.insert(t.round() as u64);
        }
    }

    axis.into_iter()
        .enumerate()
        .map(|(i, s)| {
            let sample: Vec<f64> = records
                .iter()
                .map(|r| curve_value_at(&r.curve, s))
                .collect();
            let mean = sample.iter().sum::<f64>() / sample.len() as f64;
            let mut ci_rng = rng::from_seed(
                SeedMix::new().str("curve-ci").u64(s).u64(i as u64).finish(),
            );
            let (lo, hi) =
                stats::bootstrap_mean_ci(&sample, 0.85, DEFAULT_BOOTSTRAP_RESAMPLES, &mut ci_rng);
            CurvePoint { steps: s, mean, lo, hi }
        })
        .collect()
}

/// Writes curve points as CSV with columns `steps,mean,lo,hi`.
pub fn write_curves_csv(path: &Path, points: &[CurvePoint]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()
}

/// Population sizes exercised by the population-size control design.
pub const CONTROL_POP_SIZES: [usize; 6] = [10, 20, 50, 100, 200, 500];

/// The population-size control design: the learning algorithm on the
/// fixed-initial-states task, mutation 5%, 5 learning iterations, no noise,
/// with only the population size varying.
pub fn control_popsize_spec(base_seed: u64, max_steps: u64, replications: u64) -> ExperimentSpec {
    ExperimentSpec {
        task: TaskId::DpoleFixed,
        algo: Algo::Ssshc,
        mut_rates: vec![0.05],
        pop_sizes: CONTROL_POP_SIZES.to_vec(),
        noise_ranges: vec![0.0],
        learn_iters: vec![5],
        replications,
        base_seed,
        max_steps,
        thresholds: AlgoConfig::default_thresholds(),
    }
}

/// `(population size, individual final fitness)` pairs across all records:
/// every member of every final population contributes one pair.
pub fn popsize_fitness_pairs(records: &[RunRecord]) -> Vec<(f64, f64)> {
    let mut pairs = Vec::new();
    for r in records {
        assert!(
            !r.final_population_fitness.is_empty(),
            "population-size control needs in-memory records (per-individual \
             fitness is not persisted)"
        );
        for &f in &r.final_population_fitness {
            pairs.push((r.params.pop_size as f64, f));
        }
    }
    pairs
}

/// Spearman correlation between population size and individual final
/// fitness over all pairs.
pub fn control_popsize_correlation(records: &[RunRecord]) -> TestResult {
    let pairs = popsize_fitness_pairs(records);
    let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    stats::spearman(&x, &y)
}

/// Writes the control design's pairs as CSV with columns
/// `pop_size,final_fitness`.
pub fn write_pairs_csv(path: &Path, pairs: &[(f64, f64)]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["pop_size", "final_fitness"])?;
    for (pop, fit) in pairs {
        w.write_record([format!("{pop}"), format!("{fit:.16e}")])?;
    }
    w.flush()
}
