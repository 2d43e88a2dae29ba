use serde::{Deserialize, Serialize};

use super::{rng, uniform, zero_one_test, DatagenError, Rng};

/// Integration settings; the defaults are the experiment's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RosslerConfig {
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
    /// Total integration steps; the first half is discarded.
    pub n: usize,
}

impl Default for RosslerConfig {
    fn default() -> Self {
        RosslerConfig { beta: 2.0, gamma: 4.0, dt: 0.2, n: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RosslerLabel {
    Periodic,
    Chaotic,
    Unlabeled,
}

impl RosslerLabel {
    pub fn name(self) -> &'static str {
        match self {
            RosslerLabel::Periodic => "periodic",
            RosslerLabel::Chaotic => "chaotic",
            RosslerLabel::Unlabeled => "unlabeled",
        }
    }
}

/// Retained `x` component of one simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosslerRun {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
    pub n_points: usize,
    pub x_series: Vec<f64>,
    pub label: RosslerLabel,
}

impl RosslerRun {
    /// Labels the run chaotic when its zero-one score exceeds `threshold`.
    /// Returns the score.
    pub fn label_with_zero_one(&mut self, stride: usize, threshold: f64, rng: &mut Rng) -> Result<f64, DatagenError> {
        let score = zero_one_test(&self.x_series, stride, rng)?;
        self.label = if score > threshold { RosslerLabel::Chaotic } else { RosslerLabel::Periodic };
        Ok(score)
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], dt: f64) -> [f64; N] {
    let shift = |base: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] { std::array::from_fn(|i| base[i] + h * k[i]) };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, dt / 2.0));
    let k3 = f(&shift(y, &k2, dt / 2.0));
    let k4 = f(&shift(y, &k3, dt));
    std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// `steps` RK4 steps from `y0`, returning the state after each step.
pub fn rk4_integrate<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    dt: f64,
    steps: usize,
) -> Result<Vec<[f64; N]>, DatagenError> {
    let mut out = Vec::with_capacity(steps);
    let mut y = y0;
    for step in 0..steps {
        y = rk4_step(&f, &y, dt);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(DatagenError::BlowUp { step });
        }
        out.push(y);
    }
    Ok(out)
}

/// Integrates the Rossler system from a seeded uniform `[0, 1]^3` start and
/// keeps `x` over the second half of the trajectory.
pub fn rossler_simulate(alpha: f64, seed: u64, config: &RosslerConfig) -> Result<RosslerRun, DatagenError> {
    let RosslerConfig { beta, gamma, dt, n } = *config;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DatagenError::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if n == 0 || n % 2 != 0 {
        return Err(DatagenError::InvalidParameter(format!("step count must be positive and even, got {n}")));
    }
    if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
        return Err(DatagenError::InvalidParameter("non-finite system parameter".into()));
    }
    let mut r = rng(seed);
    let y0 = [uniform(&mut r, 0.0, 1.0), uniform(&mut r, 0.0, 1.0), uniform(&mut r, 0.0, 1.0)];
    let field = |s: &[f64; 3]| [-s[1] - s[2], s[0] + alpha * s[1], beta + s[2] * (s[0] - gamma)];
    let traj = rk4_integrate(field, y0, dt, n)?;
    Ok(RosslerRun {
        alpha,
        beta,
        gamma,
        dt,
        n_points: n,
        x_series: traj[n / 2..].iter().map(|s| s[0]).collect(),
        label: RosslerLabel::Unlabeled,
    })
}
