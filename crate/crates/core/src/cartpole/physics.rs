//! Rigid-body dynamics of a cart with two independent poles, integrated
//! with fixed-step classical Runge-Kutta.
//!
//! The equations of motion are the standard two-pole formulation in terms of
//! effective pole masses and forces:
//!
//! ```text
//! m̂_i = m_i (1 − ¾ cos²θ_i)
//! F̂_i = m_i l_i θ̇_i² sinθ_i + ¾ m_i cosθ_i (μ_p θ̇_i / (m_i l_i) + g sinθ_i)
//! ẍ   = (F + Σ F̂_i) / (M + Σ m̂_i)
//! θ̈_i = −(3 / (4 l_i)) (ẍ cosθ_i + g sinθ_i + μ_p θ̇_i / (m_i l_i))
//! ```
//!
//! θ is measured from upright, `l_i` is the pole *half*-length, and `g` is
//! the signed gravitational acceleration along the up axis (−9.8: pointing
//! down). With that sign, substituted verbatim into the formulas above, the
//! upright equilibrium is unstable — poles fall unless balanced — which is
//! the entire point of the task. A positive `g` here would simulate hanging
//! pendulums instead.

/// Physical constants and integration settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicsParams {
    /// Cart mass M, kg.
    pub cart_mass: f64,
    /// Pole masses m_i, kg.
    pub pole_mass: [f64; 2],
    /// Pole half-lengths l_i, m (the long pole is 1.0 m, so l_1 = 0.5).
    pub pole_half_length: [f64; 2],
    /// Signed gravitational acceleration along the up axis, m/s²
    /// (negative = downward).
    pub gravity: f64,
    /// Pole-hinge friction coefficient μ_p.
    pub hinge_friction: f64,
    /// Integrator step τ, s.
    pub tau: f64,
    /// Interval between controller decisions, s; must be an integer
    /// multiple of τ.
    pub control_dt: f64,
    /// Track half-width: |x| beyond this fails the episode, m.
    pub track_limit: f64,
    /// Pole failure angle: |θ_i| beyond this fails the episode, rad.
    pub angle_limit: f64,
    /// Largest force magnitude a controller may apply, N.
    pub force_limit: f64,
}

impl Default for PhysicsParams {
    /// The classic two-pole benchmark setup: a 1 kg cart on a ±2.4 m track
    /// carrying a 0.1 kg / 1.0 m pole and a 0.01 kg / 0.1 m pole, ±10 N of
    /// control force, hinge friction 2·10⁻⁶, and failure at ±36°.
    fn default() -> Self {
        PhysicsParams {
            cart_mass: 1.0,
            pole_mass: [0.1, 0.01],
            pole_half_length: [0.5, 0.05],
            gravity: -9.8,
            hinge_friction: 2e-6,
            tau: 0.01,
            control_dt: 0.02,
            track_limit: 2.4,
            angle_limit: 36.0_f64.to_radians(),
            force_limit: 10.0,
        }
    }
}

impl PhysicsParams {
    /// Number of integrator steps per control interval.
    ///
    /// Panics if the control interval is not an integer multiple of τ.
    pub fn substeps(&self) -> u32 {
        assert!(self.tau > 0.0 && self.control_dt > 0.0);
        let n = (self.control_dt / self.tau).round();
        assert!(
            n >= 1.0 && (n * self.tau - self.control_dt).abs() < 1e-12,
            "control interval {} is not a multiple of tau {}",
            self.control_dt,
            self.tau
        );
        n as u32
    }
}

/// Full state of the cart-and-poles system.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta1: f64,
    pub theta1_dot: f64,
    pub theta2: f64,
    pub theta2_dot: f64,
}

impl CartPoleState {
    pub fn to_array(self) -> [f64; 6] {
        [
            self.x,
            self.x_dot,
            self.theta1,
            self.theta1_dot,
            self.theta2,
            self.theta2_dot,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        CartPoleState {
            x: a[0],
            x_dot: a[1],
            theta1: a[2],
            theta1_dot: a[3],
            theta2: a[4],
            theta2_dot: a[5],
        }
    }

    /// Componentwise negation (the dynamics are odd under it).
    pub fn mirrored(self) -> Self {
        CartPoleState {
            x: -self.x,
            x_dot: -self.x_dot,
            theta1: -self.theta1,
            theta1_dot: -self.theta1_dot,
            theta2: -self.theta2,
            theta2_dot: -self.theta2_dot,
        }
    }
}

/// Whether the state violates the track or angle limits (strictly outside;
/// sitting exactly on a limit is still alive).
pub fn is_failed(s: &CartPoleState, p: &PhysicsParams) -> bool {
    s.x.abs() > p.track_limit
        || s.theta1.abs() > p.angle_limit
        || s.theta2.abs() > p.angle_limit
}

/// Time derivative of the state under applied force `force`, in state-array
/// order: (ẋ, ẍ, θ̇₁, θ̈₁, θ̇₂, θ̈₂).
pub fn derivatives(s: &CartPoleState, force: f64, p: &PhysicsParams) -> [f64; 6] {
    let thetas = [s.theta1, s.theta2];
    let theta_dots = [s.theta1_dot, s.theta2_dot];

    let mut sin = [0.0; 2];
    let mut cos = [0.0; 2];
    let mut friction = [0.0; 2]; // μ_p θ̇_i / (m_i l_i)
    let mut force_sum = force;
    let mut mass_sum = p.cart_mass;
    for i in 0..2 {
        let (m, l) = (p.pole_mass[i], p.pole_half_length[i]);
        let (si, ci) = thetas[i].sin_cos();
        sin[i] = si;
        cos[i] = ci;
        friction[i] = p.hinge_friction * theta_dots[i] / (m * l);
        force_sum += m * l * theta_dots[i] * theta_dots[i] * si
            + 0.75 * m * ci * (friction[i] + p.gravity * si);
        mass_sum += m * (1.0 - 0.75 * ci * ci);
    }
    let x_ddot = force_sum / mass_sum;

    let mut d = [0.0; 6];
    d[0] = s.x_dot;
    d[1] = x_ddot;
    for i in 0..2 {
        d[2 + 2 * i] = theta_dots[i];
        d[3 + 2 * i] = -0.75 * (x_ddot * cos[i] + p.gravity * sin[i] + friction[i])
            / p.pole_half_length[i];
    }
    d
}

/// One classical RK4 step of size τ with the force held constant.
pub fn rk4_step(s: &CartPoleState, force: f64, p: &PhysicsParams) -> CartPoleState {
    let tau = p.tau;
    let y = s.to_array();

    let k1 = derivatives(s, force, p);
    let k2 = derivatives(&offset(y, k1, tau / 2.0), force, p);
    let k3 = derivatives(&offset(y, k2, tau / 2.0), force, p);
    let k4 = derivatives(&offset(y, k3, tau), force, p);

    let mut out = y;
    for j in 0..6 {
        out[j] += tau / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    CartPoleState::from_array(out)
}

fn offset(y: [f64; 6], k: [f64; 6], h: f64) -> CartPoleState {
    let mut s = y;
    for j in 0..6 {
        s[j] += h * k[j];
    }
    CartPoleState::from_array(s)
}

/// Advances the state by one control interval (two RK4 substeps under the
/// default parameters) with the same force throughout.
pub fn control_step(s: &CartPoleState, force: f64, p: &PhysicsParams) -> CartPoleState {
    let mut state = *s;
    for _ in 0..p.substeps() {
        state = rk4_step(&state, force, p);
    }
    state
}
