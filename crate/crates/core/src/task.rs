//! The task abstraction the algorithms run against.

use std::sync::Arc;

use crate::genome::{GeneBounds, IntGenotype};
use crate::rng::Rng;

/// Result of scoring one genotype.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOutcome {
    /// Fitness in [0, 1]; higher is better.
    pub fitness: f64,
    /// Simulator steps this evaluation consumed, charged against the run
    /// budget. Never zero: even a degenerate episode costs at least the work
    /// of detecting that it is degenerate.
    pub steps: u64,
}

/// A fitness landscape over bounded integer genotypes.
///
/// Implementations must be deterministic given the genotype and the state of
/// `rng`: stochastic tasks (randomised episode initialisation) must draw all
/// randomness from the supplied generator and nothing else.
pub trait Task: Sync {
    /// The genotype shape this task evaluates. All genotypes passed to
    /// [`Task::evaluate`] must have been built against these bounds.
    fn bounds(&self) -> Arc<GeneBounds>;

    /// Scores a genotype, reporting fitness and consumed simulator steps.
    fn evaluate(&self, genotype: &IntGenotype, rng: &mut Rng) -> EvalOutcome;
}
