//! The recurrent neural controller and its sensor interface.
//!
//! The network has 4 input channels, one fully-recurrent hidden layer of
//! logistic units, and one logistic output unit mapped linearly onto the
//! force range. All weights and biases are decoded from a `[0, 255]` integer
//! genotype through [`decode_weight`].

use crate::genome::{decode_weight, GeneBounds, IntGenotype};

use super::physics::CartPoleState;

/// Network shape. Only the hidden-layer width varies; inputs and output are
/// fixed by the task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Topology {
    pub n_hidden: usize,
}

pub const N_SENSORS: usize = 4;

impl Default for Topology {
    fn default() -> Self {
        Topology { n_hidden: 10 }
    }
}

impl Topology {
    /// Total parameter count: input-to-hidden (4h) + recurrent (h²) +
    /// hidden biases (h) + hidden-to-output (h) + output bias (1).
    pub fn genotype_len(&self) -> usize {
        let h = self.n_hidden;
        h * h + 6 * h + 1
    }

    /// Genotype bounds: every parameter is one gene in [0, 255].
    pub fn bounds(&self) -> GeneBounds {
        GeneBounds::uniform(0, 255, self.genotype_len())
    }
}

/// Normalized sensor vector: x scaled so the track maps to [−0.5, 0.5],
/// angles scaled so the failure range maps to [−5π/13, 5π/13] (a 25/13
/// rad⁻¹ gain), and a constant bias channel of 0.5. Velocities are not
/// sensed, which is what forces the controller to use its recurrence.
pub fn sensor_readout(s: &CartPoleState) -> [f64; N_SENSORS] {
    [s.x / 4.8, s.theta1 * (25.0 / 13.0), s.theta2 * (25.0 / 13.0), 0.5]
}

/// A decoded controller. Hidden activations persist across control steps
/// and are cleared by [`Controller::reset`] at each episode start.
#[derive(Clone, Debug)]
pub struct Controller {
    n_hidden: usize,
    w_in: Vec<f64>,  // [hidden][sensor], row-major
    w_rec: Vec<f64>, // [to][from], row-major
    b_hidden: Vec<f64>,
    w_out: Vec<f64>,
    b_out: f64,
    hidden: Vec<f64>,
    scratch: Vec<f64>,
}

impl Controller {
    /// Decodes a genotype laid out in blocks, in order: input-to-hidden
    /// weights (unit-major: all 4 sensor weights of hidden unit 0 first),
    /// recurrent weights (destination-major), hidden biases, hidden-to-output
    /// weights, output bias.
    pub fn decode(genotype: &IntGenotype, topology: Topology) -> Self {
        assert_eq!(
            genotype.len(),
            topology.genotype_len(),
            "genotype length does not match topology"
        );
        let weights: Vec<f64> = genotype.genes().iter().map(|&g| decode_weight(g)).collect();
        Self::from_weights(topology, &weights)
    }

    /// Builds a controller from already-decoded weights, same layout as
    /// [`Controller::decode`]. Mostly useful for tests and analysis.
    pub fn from_weights(topology: Topology, weights: &[f64]) -> Self {
        let h = topology.n_hidden;
        assert_eq!(weights.len(), topology.genotype_len(), "weight count mismatch");
        let mut at = 0;
        let mut take = |n: usize| {
            at += n;
            weights[at - n..at].to_vec()
        };
        let w_in = take(N_SENSORS * h);
        let w_rec = take(h * h);
        let b_hidden = take(h);
        let w_out = take(h);
        Controller {
            n_hidden: h,
            w_in,
            w_rec,
            b_hidden,
            w_out,
            b_out: weights[at],
            hidden: vec![0.0; h],
            scratch: vec![0.0; h],
        }
    }

    /// Clears the hidden state (all activations to 0) for a fresh episode.
    pub fn reset(&mut self) {
        self.hidden.fill(0.0);
    }

    /// One synchronous network update: every hidden unit reads the sensors
    /// and the *previous* hidden activations, then the output unit reads the
    /// new hidden layer. Returns the output activation in [0, 1].
    pub fn activate(&mut self, sensors: [f64; N_SENSORS]) -> f64 {
        let h = self.n_hidden;
        for j in 0..h {
            let mut z = self.b_hidden[j];
            for (k, &s) in sensors.iter().enumerate() {
                z += self.w_in[j * N_SENSORS + k] * s;
            }
            for k in 0..h {
                z += self.w_rec[j * h + k] * self.hidden[k];
            }
            self.scratch[j] = logistic(z);
        }
        std::mem::swap(&mut self.hidden, &mut self.scratch);

        let mut z = self.b_out;
        for j in 0..h {
            z += self.w_out[j] * self.hidden[j];
        }
        logistic(z)
    }

    /// Convenience: activation followed by the force mapping.
    pub fn force(&mut self, sensors: [f64; N_SENSORS], force_limit: f64) -> f64 {
        output_to_force(self.activate(sensors), force_limit)
    }
}

/// Maps the output activation in [0, 1] linearly onto [−limit, +limit].
pub fn output_to_force(output: f64, force_limit: f64) -> f64 {
    (output - 0.5) * 2.0 * force_limit
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::IntGenotype;
    use crate::rng;
    use std::sync::Arc;

    #[test]
    fn default_topology_has_161_parameters() {
        assert_eq!(Topology::default().genotype_len(), 161);
        assert_eq!(Topology { n_hidden: 3 }.genotype_len(), 28);
    }

    #[test]
    fn sensor_scaling_endpoints() {
        assert_eq!(
            sensor_readout(&CartPoleState::default()),
            [0.0, 0.0, 0.0, 0.5]
        );
        let s = CartPoleState {
            x: 2.4,
            theta1: std::f64::consts::PI / 5.0,
            ..CartPoleState::default()
        };
        let r = sensor_readout(&s);
        assert_eq!(r[0], 0.5);
        assert!((r[1] - 5.0 * std::f64::consts::PI / 13.0).abs() < 1e-15);
    }

    #[test]
    fn all_zero_genes_decode_to_minus_eight() {
        let topo = Topology::default();
        let bounds = Arc::new(topo.bounds());
        let g = IntGenotype::from_genes(&bounds, vec![0; topo.genotype_len()]);
        let c = Controller::decode(&g, topo);
        assert!(c.w_in.iter().all(|&w| w == -8.0));
        assert!(c.w_rec.iter().all(|&w| w == -8.0));
        assert_eq!(c.b_out, -8.0);
    }

    #[test]
    fn decode_matches_from_weights() {
        let topo = Topology { n_hidden: 4 };
        let bounds = Arc::new(topo.bounds());
        let g = IntGenotype::random(&bounds, &mut rng::from_seed(5));
        let weights: Vec<f64> = g.genes().iter().map(|&v| decode_weight(v)).collect();
        let mut a = Controller::decode(&g, topo);
        let mut b = Controller::from_weights(topo, &weights);
        let sensors = [0.1, -0.2, 0.05, 0.5];
        for _ in 0..5 {
            assert_eq!(a.activate(sensors), b.activate(sensors));
        }
    }

    #[test]
    fn zero_weights_mean_zero_force() {
        let topo = Topology::default();
        let mut c = Controller::from_weights(topo, &vec![0.0; topo.genotype_len()]);
        let o = c.activate([0.3, -0.1, 0.2, 0.5]);
        assert_eq!(o, 0.5);
        assert_eq!(output_to_force(o, 10.0), 0.0);
    }

    #[test]
    fn saturated_output_gives_full_force() {
        let topo = Topology { n_hidden: 2 };
        let mut weights = vec![0.0; topo.genotype_len()];
        let len = weights.len();
        weights[len - 1] = 8.0; // output bias alone saturates nothing: logistic(8) < 1
        let mut c = Controller::from_weights(topo, &weights);
        let o = c.activate([0.0, 0.0, 0.0, 0.5]);
        assert!((output_to_force(o, 10.0) - 10.0).abs() < 0.01);
        assert!(output_to_force(1.0, 10.0) == 10.0 && output_to_force(0.0, 10.0) == -10.0);
    }

    #[test]
    fn recurrence_makes_identical_inputs_differ() {
        let topo = Topology::default();
        let bounds = Arc::new(topo.bounds());
        let g = IntGenotype::random(&bounds, &mut rng::from_seed(6));
        let mut c = Controller::decode(&g, topo);
        let sensors = [0.1, 0.1, 0.1, 0.5];
        let first = c.activate(sensors);
        let second = c.activate(sensors);
        assert_ne!(first, second);
    }

    #[test]
    fn reset_restores_the_initial_response() {
        let topo = Topology::default();
        let bounds = Arc::new(topo.bounds());
        let g = IntGenotype::random(&bounds, &mut rng::from_seed(7));
        let mut c = Controller::decode(&g, topo);
        let sensors = [-0.2, 0.3, 0.0, 0.5];
        let fresh: Vec<f64> = (0..4).map(|_| c.activate(sensors)).collect();
        c.reset();
        let replay: Vec<f64> = (0..4).map(|_| c.activate(sensors)).collect();
        assert_eq!(fresh, replay);
    }

    #[test]
    #[should_panic(expected = "length does not match")]
    fn decode_rejects_wrong_length() {
        let bounds = Arc::new(GeneBounds::uniform(0, 255, 10));
        let g = IntGenotype::from_genes(&bounds, vec![0; 10]);
        Controller::decode(&g, Topology::default());
    }
}
