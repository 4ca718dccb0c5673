//! Non-Markovian double-pole balancing: physics, recurrent controller,
//! episode execution, and the two evaluation protocols.
//!
//! An evaluation runs 8 episodes of at most 1000 control steps each. Under
//! the Fixed protocol the episodes start from the 8 canonical initial
//! states; under the Random protocol every episode starts from a fresh
//! uniform draw. Episode fitness is the fraction of the 1000 steps survived,
//! and the evaluation's fitness is the mean over the 8 episodes. Each
//! completed control step costs one budget step, so an evaluation consumes
//! at most 8000.

mod controller;
mod physics;

pub use controller::{output_to_force, sensor_readout, Controller, Topology, N_SENSORS};
pub use physics::{control_step, derivatives, is_failed, rk4_step, CartPoleState, PhysicsParams};

use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::Rng as _;

use crate::genome::{GeneBounds, IntGenotype};
use crate::rng::Rng;
use crate::task::{EvalOutcome, Task};

/// Control steps an episode may last.
pub const EPISODE_STEPS: u64 = 1000;

/// Episodes per evaluation.
pub const EPISODES_PER_EVAL: usize = 8;

/// The 8 canonical initial states of the Fixed protocol: one displacement
/// per state variable, in both directions, one variable at a time.
pub const FIXED_INITIAL_STATES: [CartPoleState; EPISODES_PER_EVAL] = {
    let zero = CartPoleState {
        x: 0.0,
        x_dot: 0.0,
        theta1: 0.0,
        theta1_dot: 0.0,
        theta2: 0.0,
        theta2_dot: 0.0,
    };
    [
        CartPoleState { x: -1.944, ..zero },
        CartPoleState { x: 1.944, ..zero },
        CartPoleState { x_dot: -1.215, ..zero },
        CartPoleState { x_dot: 1.215, ..zero },
        CartPoleState { theta1: -0.10472, ..zero },
        CartPoleState { theta1: 0.10472, ..zero },
        CartPoleState { theta2: -0.135088, ..zero },
        CartPoleState { theta2: 0.135088, ..zero },
    ]
};

/// Symmetric half-ranges for the Random protocol's uniform initial-state
/// draws; same magnitudes as the Fixed protocol's displacements.
#[derive(Clone, Copy, Debug)]
pub struct RandomInitRanges {
    pub x: f64,
    pub x_dot: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta1_dot: f64,
    pub theta2_dot: f64,
}

pub const RANDOM_INIT_RANGES: RandomInitRanges = RandomInitRanges {
    x: 1.944,
    x_dot: 1.215,
    theta1: 0.10472,
    theta2: 0.135088,
    theta1_dot: 0.10472,
    theta2_dot: 0.135088,
};

/// Draws a Random-protocol initial state. The six variables are drawn in a
/// fixed documented order (x, ẋ, θ₁, θ₂, θ̇₁, θ̇₂) so that rng consumption is
/// reproducible.
pub fn draw_initial_state(rng: &mut Rng) -> CartPoleState {
    let r = RANDOM_INIT_RANGES;
    let x = rng.gen_range(-r.x..=r.x);
    let x_dot = rng.gen_range(-r.x_dot..=r.x_dot);
    let theta1 = rng.gen_range(-r.theta1..=r.theta1);
    let theta2 = rng.gen_range(-r.theta2..=r.theta2);
    let theta1_dot = rng.gen_range(-r.theta1_dot..=r.theta1_dot);
    let theta2_dot = rng.gen_range(-r.theta2_dot..=r.theta2_dot);
    CartPoleState {
        x,
        x_dot,
        theta1,
        theta1_dot,
        theta2,
        theta2_dot,
    }
}

/// How evaluation episodes choose their initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// The 8 canonical states, in order. Evaluation is deterministic.
    Fixed,
    /// 8 fresh uniform draws per evaluation.
    Random,
}

/// Runs one episode from `init`, returning the episode fitness (fraction of
/// [`EPISODE_STEPS`] survived) and the number of completed control steps.
///
/// The hidden state is reset at the start. Each iteration reads the sensors,
/// activates the controller, applies the force for one control interval, and
/// then checks the limits: a step that ends outside them is not counted.
pub fn run_episode(
    controller: &mut Controller,
    init: CartPoleState,
    p: &PhysicsParams,
) -> (f64, u64) {
    controller.reset();
    let mut state = init;
    if is_failed(&state, p) {
        return (0.0, 0);
    }
    let mut completed = 0u64;
    while completed < EPISODE_STEPS {
        let force = controller.force(sensor_readout(&state), p.force_limit);
        state = control_step(&state, force, p);
        if is_failed(&state, p) {
            break;
        }
        completed += 1;
    }
    (completed as f64 / EPISODE_STEPS as f64, completed)
}

/// One row of a debugging trajectory trace: the state after `step` control
/// steps and the force that produced it.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub step: u64,
    pub state: CartPoleState,
    pub force: f64,
}

/// Like [`run_episode`] but records the trajectory, including the final
/// out-of-range state when the episode fails early.
pub fn trace_episode(
    controller: &mut Controller,
    init: CartPoleState,
    p: &PhysicsParams,
) -> Vec<TraceRow> {
    controller.reset();
    let mut rows = Vec::new();
    let mut state = init;
    if is_failed(&state, p) {
        return rows;
    }
    for step in 1..=EPISODE_STEPS {
        let force = controller.force(sensor_readout(&state), p.force_limit);
        state = control_step(&state, force, p);
        rows.push(TraceRow { step, state, force });
        if is_failed(&state, p) {
            break;
        }
    }
    rows
}

/// Writes a trace as CSV with header
/// `step,x,x_dot,theta1,theta1_dot,theta2,theta2_dot,force`.
pub fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "step,x,x_dot,theta1,theta1_dot,theta2,theta2_dot,force")?;
    for r in rows {
        let s = r.state;
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            r.step, s.x, s.x_dot, s.theta1, s.theta1_dot, s.theta2, s.theta2_dot, r.force
        )?;
    }
    Ok(())
}

/// The double-pole balancing task over controller genotypes.
pub struct DoublePoleTask {
    protocol: Protocol,
    topology: Topology,
    params: PhysicsParams,
    bounds: Arc<GeneBounds>,
}

impl DoublePoleTask {
    pub fn fixed() -> Self {
        Self::with(Protocol::Fixed, Topology::default(), PhysicsParams::default())
    }

    pub fn random() -> Self {
        Self::with(Protocol::Random, Topology::default(), PhysicsParams::default())
    }

    pub fn with(protocol: Protocol, topology: Topology, params: PhysicsParams) -> Self {
        DoublePoleTask {
            protocol,
            topology,
            params,
            bounds: Arc::new(topology.bounds()),
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }
}

impl Task for DoublePoleTask {
    fn bounds(&self) -> Arc<GeneBounds> {
        Arc::clone(&self.bounds)
    }

    fn evaluate(&self, genotype: &IntGenotype, rng: &mut Rng) -> EvalOutcome {
        let mut controller = Controller::decode(genotype, self.topology);
        let mut fitness_sum = 0.0;
        let mut steps = 0u64;
        // the random protocol ignores the episode index but must still draw
        // its states in episode order, so a counted loop fits both arms
        #[allow(clippy::needless_range_loop)]
        for episode in 0..EPISODES_PER_EVAL {
            let init = match self.protocol {
                Protocol::Fixed => FIXED_INITIAL_STATES[episode],
                Protocol::Random => draw_initial_state(rng),
            };
            let (f, s) = run_episode(&mut controller, init, &self.params);
            fitness_sum += f;
            steps += s;
        }
        EvalOutcome {
            fitness: fitness_sum / EPISODES_PER_EVAL as f64,
            steps,
        }
    }
}
