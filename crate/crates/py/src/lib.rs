//! Python bindings: evaluate task genotypes, run the three algorithms, and
//! call the statistics helpers from Python.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use evolearn_core::algorithms::{self, Algo, AlgoConfig};
use evolearn_core::cartpole::DoublePoleTask;
use evolearn_core::circuits::{self, Circuit, CircuitLayout, ParityTask};
use evolearn_core::genome::{self, IntGenotype};
use evolearn_core::harness::TaskId;
use evolearn_core::rng;
use evolearn_core::stats;
use evolearn_core::task::Task;

fn parse_task(name: &str) -> PyResult<TaskId> {
    TaskId::parse(name).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown task {name:?} (parity, dpole-fixed, dpole-random)"
        ))
    })
}

fn parse_algo(name: &str) -> PyResult<Algo> {
    Algo::parse(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown algorithm {name:?} (sss, hc, ssshc)")))
}

fn genotype(task: &dyn Task, genes: Vec<i32>) -> PyResult<IntGenotype> {
    let bounds = task.bounds();
    if genes.len() != bounds.len() {
        return Err(PyValueError::new_err(format!(
            "expected {} genes, got {}",
            bounds.len(),
            genes.len()
        )));
    }
    if !bounds.contains(&genes) {
        return Err(PyValueError::new_err("genes out of range"));
    }
    Ok(IntGenotype::from_genes(&bounds, genes))
}

/// Completed run of one algorithm.
#[pyclass(frozen)]
struct RunResult {
    /// Best-ever true fitness at a generation boundary.
    #[pyo3(get)]
    final_fitness: f64,
    /// Total simulator steps consumed.
    #[pyo3(get)]
    total_steps: u64,
    /// Genes of the best individual.
    #[pyo3(get)]
    best_genes: Vec<i32>,
    /// (cumulative steps, best-ever fitness) per generation.
    #[pyo3(get)]
    curve: Vec<(u64, f64)>,
    threshold_steps: Vec<(f64, u64)>,
}

#[pymethods]
impl RunResult {
    /// Steps at the first crossing of `threshold` (the budget if never
    /// crossed).
    fn steps_to(&self, threshold: f64) -> PyResult<u64> {
        self.threshold_steps
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, s)| *s)
            .ok_or_else(|| {
                PyValueError::new_err(format!("threshold {threshold} was not configured"))
            })
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(final_fitness={}, total_steps={}, generations={})",
            self.final_fitness,
            self.total_steps,
            self.curve.len()
        )
    }
}

/// Runs `algo` on `task` and returns the run's log.
#[pyfunction]
#[pyo3(signature = (task, algo, *, mut_rate, pop_size, max_steps, noise=0.0, learn_iters=0, seed=1, thresholds=vec![0.95, 1.0]))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    task: &str,
    algo: &str,
    mut_rate: f64,
    pop_size: usize,
    max_steps: u64,
    noise: f64,
    learn_iters: u64,
    seed: u64,
    thresholds: Vec<f64>,
) -> PyResult<RunResult> {
    let task = parse_task(task)?.build();
    let algo = parse_algo(algo)?;
    let cfg = AlgoConfig {
        n_parents: pop_size,
        mut_rate,
        noise_range: noise,
        n_learn_iters: learn_iters,
        max_steps,
        seed,
        thresholds,
    };
    let log = py.detach(|| algo.run(&*task, &cfg));
    let mut curve = Vec::with_capacity(log.generations.len());
    let mut best = f64::NEG_INFINITY;
    for g in &log.generations {
        best = best.max(g.best);
        curve.push((g.cum_steps, best));
    }
    Ok(RunResult {
        final_fitness: log.best_fitness,
        total_steps: log.total_steps,
        best_genes: log.best_genotype.genes().to_vec(),
        curve,
        threshold_steps: log.threshold_steps,
    })
}

/// Fraction of the 32 five-input patterns a circuit genotype classifies
/// correctly as even parity.
#[pyfunction]
fn parity_fitness(genes: Vec<i32>) -> PyResult<f64> {
    let task = ParityTask::new();
    let g = genotype(&task, genes)?;
    Ok(task.fitness_of(&Circuit::decode(&g, task.layout())))
}

/// 32-bit truth table of a circuit genotype (bit p = output on pattern p).
#[pyfunction]
fn parity_truth_table(genes: Vec<i32>) -> PyResult<u32> {
    let task = ParityTask::new();
    let g = genotype(&task, genes)?;
    Ok(Circuit::decode(&g, &CircuitLayout::default()).truth_table())
}

/// Human-readable netlist of the active gates of a circuit genotype.
#[pyfunction]
fn parity_netlist(genes: Vec<i32>) -> PyResult<String> {
    let task = ParityTask::new();
    let g = genotype(&task, genes)?;
    Ok(Circuit::decode(&g, &CircuitLayout::default()).netlist())
}

/// A genotype that computes five-input even parity exactly.
#[pyfunction]
fn perfect_parity_genes() -> Vec<i32> {
    circuits::perfect_parity_genes(&CircuitLayout::default())
}

/// Evaluates a controller genotype on the double-pole task; returns its
/// fitness. The fixed protocol is deterministic; the random protocol draws
/// its initial states from `seed`.
#[pyfunction]
#[pyo3(signature = (genes, protocol="fixed", seed=0))]
fn dpole_fitness(genes: Vec<i32>, protocol: &str, seed: u64) -> PyResult<f64> {
    let task = match protocol {
        "fixed" => DoublePoleTask::fixed(),
        "random" => DoublePoleTask::random(),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown protocol {other:?} (fixed, random)"
            )))
        }
    };
    let g = genotype(&task, genes)?;
    Ok(task.evaluate(&g, &mut rng::from_seed(seed)).fitness)
}

/// Control steps survived in each of the 8 fixed-protocol episodes.
#[pyfunction]
fn dpole_episode_steps(genes: Vec<i32>) -> PyResult<Vec<u64>> {
    use evolearn_core::cartpole::{run_episode, Controller, Topology, FIXED_INITIAL_STATES};
    let task = DoublePoleTask::fixed();
    let g = genotype(&task, genes)?;
    let mut controller = Controller::decode(&g, Topology::default());
    let params = *task.params();
    Ok(FIXED_INITIAL_STATES
        .iter()
        .map(|&init| run_episode(&mut controller, init, &params).1)
        .collect())
}

/// Maps a gene in [0, 255] to a connection weight in [-8, 8].
#[pyfunction]
fn decode_weight(gene: i32) -> PyResult<f64> {
    if !(0..=255).contains(&gene) {
        return Err(PyValueError::new_err("gene must lie in [0, 255]"));
    }
    Ok(genome::decode_weight(gene))
}

/// Two-sided Mann-Whitney U test; returns (U, p).
#[pyfunction]
fn mann_whitney_u(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(PyValueError::new_err("samples must be non-empty"));
    }
    let r = stats::mann_whitney_u(&a, &b);
    Ok((r.statistic, r.p_value))
}

/// Bonferroni correction for `m` planned comparisons.
#[pyfunction]
fn bonferroni(p_values: Vec<f64>, m: usize) -> PyResult<Vec<f64>> {
    if m < p_values.len() {
        return Err(PyValueError::new_err(
            "family size m must be at least the number of p-values",
        ));
    }
    Ok(stats::bonferroni(&p_values, m))
}

/// Spearman rank correlation; returns (rho, p).
#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(PyValueError::new_err(
            "samples must have equal length of at least 3",
        ));
    }
    let r = stats::spearman(&x, &y);
    Ok((r.statistic, r.p_value))
}

/// Percentile-bootstrap confidence interval of the mean.
#[pyfunction]
#[pyo3(signature = (sample, level=0.85, n_resamples=5000, seed=0))]
fn bootstrap_mean_ci(
    sample: Vec<f64>,
    level: f64,
    n_resamples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    if sample.is_empty() {
        return Err(PyValueError::new_err("sample must be non-empty"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(PyValueError::new_err("level must lie strictly in (0, 1)"));
    }
    if n_resamples < 100 {
        return Err(PyValueError::new_err("need at least 100 resamples"));
    }
    Ok(stats::bootstrap_mean_ci(
        &sample,
        level,
        n_resamples,
        &mut rng::from_seed(seed),
    ))
}

/// Additive uniform selection noise applied to a fitness value.
#[pyfunction]
#[pyo3(signature = (fitness, noise_range, seed=0))]
fn noisy(fitness: f64, noise_range: f64, seed: u64) -> PyResult<f64> {
    if noise_range < 0.0 {
        return Err(PyValueError::new_err("noise range must be non-negative"));
    }
    Ok(algorithms::noisy(
        fitness,
        noise_range,
        &mut rng::from_seed(seed),
    ))
}

#[pymodule]
fn evolearn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(parity_fitness, m)?)?;
    m.add_function(wrap_pyfunction!(parity_truth_table, m)?)?;
    m.add_function(wrap_pyfunction!(parity_netlist, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_parity_genes, m)?)?;
    m.add_function(wrap_pyfunction!(dpole_fitness, m)?)?;
    m.add_function(wrap_pyfunction!(dpole_episode_steps, m)?)?;
    m.add_function(wrap_pyfunction!(decode_weight, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney_u, m)?)?;
    m.add_function(wrap_pyfunction!(bonferroni, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_mean_ci, m)?)?;
    m.add_function(wrap_pyfunction!(noisy, m)?)?;
    Ok(())
}
