//! Steady-state evolutionary algorithms with optional lifetime learning,
//! evaluated on two benchmark tasks: even-parity circuit synthesis and
//! non-Markovian double-pole balancing.
//!
//! The crate is organised around a small [`task::Task`] abstraction. A task
//! owns the genotype bounds and knows how to score a genotype; the
//! [`algorithms`] module runs evolutionary loops against any task under a
//! strict evaluation-step budget; the [`harness`] module sweeps parameter
//! grids, replicates runs under derived seeds, and serialises results
//! deterministically.
//!
//! Everything downstream of a seed is reproducible: runs with the same
//! configuration produce byte-identical output files regardless of the level
//! of parallelism used by the harness.

pub mod algorithms;
pub mod cartpole;
pub mod circuits;
pub mod genome;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod task;
