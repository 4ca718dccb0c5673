//! The three evolutionary algorithms under comparison.
//!
//! * [`run_sss`] — stochastic state search: a (μ+μ) evolution strategy in
//!   which every parent is re-evaluated each generation, produces one
//!   mutated offspring, and the best μ of the 2μ individuals survive,
//!   ranked by *noise-perturbed* fitness.
//! * [`run_hc`] — a population of μ independent (1+1) hill-climbing
//!   lineages; an offspring replaces its parent when its perturbed fitness
//!   is at least the parent's.
//! * [`run_ssshc`] — SSS followed, each generation, by a per-survivor
//!   stochastic hill-climbing phase whose accepted variations overwrite the
//!   survivor's genotype (inherited, not discarded), under the same
//!   not-worse acceptance rule the hill climber uses.
//!
//! All three log the *true* (unperturbed) fitness; selection noise affects
//! decisions only. Evaluation costs accumulate in simulator steps and the
//! budget is checked at generation boundaries, so a run may overshoot
//! `max_steps` by at most one generation's worth of evaluations.
//!
//! Randomness is split into named streams derived from the run seed
//! ("init", "mutate", "noise", "task"), so e.g. enabling selection noise
//! does not change which genotypes get produced by mutation. The
//! hill climber instead derives one stream per lineage, which makes the
//! lineages fully independent processes.

use serde::{Deserialize, Serialize};

use crate::genome::IntGenotype;
use crate::rng::{self, Rng, SeedMix};
use crate::task::Task;

/// Identifies one of the three algorithms; used for dispatch and reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Sss,
    Hc,
    Ssshc,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Sss, Algo::Hc, Algo::Ssshc];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Sss => "sss",
            Algo::Hc => "hc",
            Algo::Ssshc => "ssshc",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        match s {
            "sss" => Some(Algo::Sss),
            "hc" => Some(Algo::Hc),
            "ssshc" => Some(Algo::Ssshc),
            _ => None,
        }
    }

    /// Runs this algorithm on `task` under `cfg`.
    pub fn run(self, task: &dyn Task, cfg: &AlgoConfig) -> RunLog {
        match self {
            Algo::Sss => run_sss(task, cfg),
            Algo::Hc => run_hc(task, cfg),
            Algo::Ssshc => run_ssshc(task, cfg),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters shared by all three algorithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// Population size μ.
    pub n_parents: usize,
    /// Per-gene mutation probability.
    pub mut_rate: f64,
    /// Half-width of the uniform selection-noise interval; 0 disables noise.
    pub noise_range: f64,
    /// Learning iterations per survivor per generation (SSSHC only).
    pub n_learn_iters: u64,
    /// Evaluation budget in simulator steps.
    pub max_steps: u64,
    /// Run seed; all randomness derives from it.
    pub seed: u64,
    /// Fitness levels whose first crossing (by best-ever true fitness, at
    /// generation boundaries) is recorded in the log.
    pub thresholds: Vec<f64>,
}

impl AlgoConfig {
    /// Default threshold list: quasi-optimal and optimal.
    pub fn default_thresholds() -> Vec<f64> {
        vec![0.95, 1.0]
    }

    pub fn new(n_parents: usize, mut_rate: f64, max_steps: u64, seed: u64) -> Self {
        AlgoConfig {
            n_parents,
            mut_rate,
            noise_range: 0.0,
            n_learn_iters: 0,
            max_steps,
            seed,
            thresholds: Self::default_thresholds(),
        }
    }

    fn validate(&self) {
        assert!(self.n_parents >= 1, "population size must be at least 1");
        assert!(
            (0.0..=1.0).contains(&self.mut_rate),
            "mutation rate must lie in [0, 1], got {}",
            self.mut_rate
        );
        assert!(
            self.noise_range >= 0.0,
            "noise range must be non-negative, got {}",
            self.noise_range
        );
        assert!(self.max_steps >= 1, "step budget must be at least 1");
    }
}

/// Perturbs a fitness value with additive uniform noise on
/// `[-noise_range, +noise_range]`. The result is intentionally not clamped
/// to [0, 1]. A zero range returns `f` exactly and consumes no randomness.
pub fn noisy(f: f64, noise_range: f64, rng: &mut Rng) -> f64 {
    assert!(noise_range >= 0.0, "noise range must be non-negative");
    if noise_range == 0.0 {
        return f;
    }
    f + rand::Rng::gen_range(rng, -noise_range..=noise_range)
}

/// End-of-generation snapshot of the population's true fitness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenRecord {
    /// Generation index, starting at 0.
    pub generation: u64,
    /// Simulator steps consumed by the run so far.
    pub cum_steps: u64,
    /// Best true fitness in the population at the end of the generation.
    pub best: f64,
    /// Mean true fitness in the population at the end of the generation.
    pub mean: f64,
}

/// Complete record of a single run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    /// One record per generation, in order; `cum_steps` strictly increases.
    pub generations: Vec<GenRecord>,
    /// Total simulator steps; ≥ `max_steps` and equal to the sum of every
    /// evaluation's step count.
    pub total_steps: u64,
    /// Best-ever true fitness seen at any generation boundary.
    pub best_fitness: f64,
    /// The individual that achieved `best_fitness`.
    pub best_genotype: IntGenotype,
    /// For each configured threshold, the cumulative step count at the first
    /// generation boundary where best-ever true fitness reached it, or the
    /// step budget if it never did.
    pub threshold_steps: Vec<(f64, u64)>,
    /// True fitness of each population member at the final generation.
    pub final_population_fitness: Vec<f64>,
}

impl RunLog {
    /// Steps at first crossing of `threshold` (budget when never crossed),
    /// if that threshold was configured.
    pub fn steps_to(&self, threshold: f64) -> Option<u64> {
        self.threshold_steps
            .iter()
            .find(|(t, _)| *t == threshold)
            .map(|(_, s)| *s)
    }
}

/// Incrementally builds a [`RunLog`] from end-of-generation populations.
struct LogBuilder {
    generations: Vec<GenRecord>,
    best_fitness: f64,
    best_genotype: Option<IntGenotype>,
    pending: Vec<(f64, Option<u64>)>,
}

impl LogBuilder {
    fn new(thresholds: &[f64]) -> Self {
        LogBuilder {
            generations: Vec::new(),
            best_fitness: f64::NEG_INFINITY,
            best_genotype: None,
            pending: thresholds.iter().map(|&t| (t, None)).collect(),
        }
    }

    /// Records one finished generation from `(genotype, true_fitness)` pairs.
    fn record<'a, I>(&mut self, cum_steps: u64, population: I)
    where
        I: Iterator<Item = (&'a IntGenotype, f64)>,
    {
        let mut best: Option<(&IntGenotype, f64)> = None;
        let mut sum = 0.0;
        let mut n = 0usize;
        for (g, f) in population {
            sum += f;
            n += 1;
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((g, f));
            }
        }
        let (best_g, best_f) = best.expect("population must be non-empty");
        self.generations.push(GenRecord {
            generation: self.generations.len() as u64,
            cum_steps,
            best: best_f,
            mean: sum / n as f64,
        });
        if best_f > self.best_fitness {
            self.best_fitness = best_f;
            self.best_genotype = Some(best_g.clone());
        }
        for (t, at) in self.pending.iter_mut() {
            if at.is_none() && self.best_fitness >= *t {
                *at = Some(cum_steps);
            }
        }
    }

    fn finish(self, total_steps: u64, budget: u64, final_population_fitness: Vec<f64>) -> RunLog {
        RunLog {
            generations: self.generations,
            total_steps,
            best_fitness: self.best_fitness,
            best_genotype: self
                .best_genotype
                .expect("a run always executes at least one generation"),
            threshold_steps: self
                .pending
                .into_iter()
                .map(|(t, at)| (t, at.unwrap_or(budget)))
                .collect(),
            final_population_fitness,
        }
    }
}

/// One evaluated individual in the generational engine's pool.
struct Evaluated {
    genotype: IntGenotype,
    true_fit: f64,
    noisy_fit: f64,
}

/// Shared engine behind [`run_sss`] (`n_learn_iters` forced to 0) and
/// [`run_ssshc`].
fn run_generational(task: &dyn Task, cfg: &AlgoConfig, n_learn_iters: u64) -> RunLog {
    cfg.validate();
    let bounds = task.bounds();
    let mu = cfg.n_parents;

    let mut init_rng = rng::stream(cfg.seed, "init");
    let mut mut_rng = rng::stream(cfg.seed, "mutate");
    let mut noise_rng = rng::stream(cfg.seed, "noise");
    let mut task_rng = rng::stream(cfg.seed, "task");

    let mut parents: Vec<IntGenotype> = (0..mu)
        .map(|_| IntGenotype::random(&bounds, &mut init_rng))
        .collect();

    let mut log = LogBuilder::new(&cfg.thresholds);
    let mut steps = 0u64;
    let mut last_fits: Vec<f64> = Vec::new();

    while steps < cfg.max_steps {
        // Evaluate all parents, then produce and evaluate one offspring per
        // parent, in index order.
        let mut pool: Vec<Evaluated> = Vec::with_capacity(2 * mu);
        for p in &parents {
            let out = task.evaluate(p, &mut task_rng);
            steps += out.steps;
            pool.push(Evaluated {
                genotype: p.clone(),
                true_fit: out.fitness,
                noisy_fit: noisy(out.fitness, cfg.noise_range, &mut noise_rng),
            });
        }
        for i in 0..mu {
            let child = pool[i].genotype.mutated(cfg.mut_rate, &mut mut_rng);
            let out = task.evaluate(&child, &mut task_rng);
            steps += out.steps;
            pool.push(Evaluated {
                genotype: child,
                true_fit: out.fitness,
                noisy_fit: noisy(out.fitness, cfg.noise_range, &mut noise_rng),
            });
        }

        // Rank by perturbed fitness, descending. The sort is stable and the
        // pool lists parents before offspring, so ties resolve in favour of
        // parents (and lower-index individuals).
        pool.sort_by(|a, b| b.noisy_fit.total_cmp(&a.noisy_fit));
        pool.truncate(mu);

        // Lamarckian learning phase: each survivor climbs independently
        // under the hill climber's acceptance rule — a candidate that is not
        // worse replaces the incumbent. Accepting ties matters: on plateaus
        // (ubiquitous in the gate-circuit task) neutral drift is what lets
        // the climb escape, and a strictly-greater rule stalls there. The
        // fitness a survivor defends is frozen at its last accepted
        // perturbed value rather than re-drawn each iteration.
        for s in pool.iter_mut() {
            for _ in 0..n_learn_iters {
                let candidate = s.genotype.mutated(cfg.mut_rate, &mut mut_rng);
                let out = task.evaluate(&candidate, &mut task_rng);
                steps += out.steps;
                let cand_noisy = noisy(out.fitness, cfg.noise_range, &mut noise_rng);
                if cand_noisy >= s.noisy_fit {
                    s.genotype = candidate;
                    s.true_fit = out.fitness;
                    s.noisy_fit = cand_noisy;
                }
            }
        }

        log.record(steps, pool.iter().map(|e| (&e.genotype, e.true_fit)));
        last_fits = pool.iter().map(|e| e.true_fit).collect();
        parents = pool.into_iter().map(|e| e.genotype).collect();
    }

    log.finish(steps, cfg.max_steps, last_fits)
}

/// Runs the (μ+μ) stochastic state search.
pub fn run_sss(task: &dyn Task, cfg: &AlgoConfig) -> RunLog {
    run_generational(task, cfg, 0)
}

/// Runs SSS with the per-survivor Lamarckian learning phase.
pub fn run_ssshc(task: &dyn Task, cfg: &AlgoConfig) -> RunLog {
    run_generational(task, cfg, cfg.n_learn_iters)
}

/// One independent (1+1) hill-climbing lineage.
struct Lineage {
    genotype: IntGenotype,
    rng: Rng,
    /// True fitness from this lineage's most recent generation.
    current_true: f64,
}

impl Lineage {
    fn new(genotype: IntGenotype, rng: Rng) -> Self {
        Lineage {
            genotype,
            rng,
            current_true: f64::NAN,
        }
    }

    /// Runs one generation: re-evaluate the parent, evaluate one offspring,
    /// keep the offspring unless it is strictly worse (perturbed comparison).
    /// Returns the steps consumed.
    fn step(&mut self, task: &dyn Task, cfg: &AlgoConfig) -> u64 {
        let parent_out = task.evaluate(&self.genotype, &mut self.rng);
        let parent_noisy = noisy(parent_out.fitness, cfg.noise_range, &mut self.rng);
        let child = self.genotype.mutated(cfg.mut_rate, &mut self.rng);
        let child_out = task.evaluate(&child, &mut self.rng);
        let child_noisy = noisy(child_out.fitness, cfg.noise_range, &mut self.rng);
        if child_noisy >= parent_noisy {
            self.genotype = child;
            self.current_true = child_out.fitness;
        } else {
            self.current_true = parent_out.fitness;
        }
        parent_out.steps + child_out.steps
    }
}

/// Seed for lineage `p`'s private random stream.
fn lineage_seed(run_seed: u64, p: usize) -> u64 {
    SeedMix::new()
        .u64(run_seed)
        .str("lineage")
        .u64(p as u64)
        .finish()
}

/// Runs μ independent (1+1) hill-climbing lineages under a shared budget.
pub fn run_hc(task: &dyn Task, cfg: &AlgoConfig) -> RunLog {
    cfg.validate();
    let bounds = task.bounds();
    let mu = cfg.n_parents;

    let mut init_rng = rng::stream(cfg.seed, "init");
    let mut lineages: Vec<Lineage> = (0..mu)
        .map(|p| {
            Lineage::new(
                IntGenotype::random(&bounds, &mut init_rng),
                rng::from_seed(lineage_seed(cfg.seed, p)),
            )
        })
        .collect();

    let mut log = LogBuilder::new(&cfg.thresholds);
    let mut steps = 0u64;
    while steps < cfg.max_steps {
        for lineage in lineages.iter_mut() {
            steps += lineage.step(task, cfg);
        }
        log.record(steps, lineages.iter().map(|l| (&l.genotype, l.current_true)));
    }

    let final_fits = lineages.iter().map(|l| l.current_true).collect();
    log.finish(steps, cfg.max_steps, final_fits)
}
