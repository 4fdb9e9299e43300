//! Fixed-step RK4 integration of `Ẋ = σ L X`.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Laplacian;
use crate::linalg::{norm2, Matrix};
use crate::spectral;

/// `dt·σ·max|L_ii|` must not exceed this.
pub const STEP_GUARD: f64 = 0.1;
/// Per-step slack allowed when checking that a norm series is non-increasing.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("initial state has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("coupling strength must be positive and finite, got {0}")]
    BadSigma(f64),
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("horizon must be non-negative and finite, got {0}")]
    BadHorizon(f64),
    #[error("step size {dt} too large: dt·σ·max|L_ii| = {product:.3} > {STEP_GUARD}; use dt <= {suggested:e}")]
    StepTooLarge {
        dt: f64,
        product: f64,
        suggested: f64,
    },
    #[error("state diverged (non-finite) at step {0}")]
    Blowup(usize),
    #[error("trajectory needs at least two samples")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Euclidean norm of each state.
    pub norms: Vec<f64>,
    pub sigma: f64,
    pub dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds x0")
    }

    /// `t,x_0,...,x_{n-1},norm`, one row per step.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 0..n {
            let _ = write!(out, ",x_{i}");
        }
        out.push_str(",norm\n");
        for ((t, x), nrm) in self.times.iter().zip(&self.states).zip(&self.norms) {
            let _ = write!(out, "{t}");
            for v in x {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{nrm}");
        }
        out
    }
}

/// `0.01 / (σ·max|L_ii|)`, or `0.01/σ` for an edgeless graph.
pub fn default_dt(l: &Laplacian, sigma: f64) -> f64 {
    let d = l.max_abs_diagonal();
    if d > 0.0 {
        0.01 / (sigma * d)
    } else {
        0.01 / sigma
    }
}

/// `10 / (σ·max(|Re λ₂|, 0.1))`
pub fn default_horizon(l: &Laplacian, sigma: f64) -> f64 {
    let rate = spectral::convergence_rate(l).unwrap_or(0.0);
    10.0 / (sigma * rate.max(0.1))
}

/// Integrates `Ẋ = σ L X` from `x0` with classical RK4 at fixed step `dt`
/// up to `t_end` (rounded up to a whole number of steps).
///
/// The coupling is applied by scaling the matrix once, so
/// `simulate(L, x0, σ, ..)` and `simulate(σL, x0, 1, ..)` follow the same
/// arithmetic.
pub fn simulate(
    l: &Laplacian,
    x0: &[f64],
    sigma: f64,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    let n = l.n();
    if x0.len() != n {
        return Err(SimError::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(SimError::BadSigma(sigma));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::BadStep(dt));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(SimError::BadHorizon(t_end));
    }
    let m = l.matrix().scaled(sigma);
    let dmax = (0..n).fold(0.0f64, |acc, i| acc.max(m[(i, i)].abs()));
    let product = dt * dmax;
    if product > STEP_GUARD {
        return Err(SimError::StepTooLarge {
            dt,
            product,
            suggested: STEP_GUARD / dmax,
        });
    }

    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.to_vec());
    norms.push(norm2(x0));

    let mut x = x0.to_vec();
    let mut tmp = vec![0.0; n];
    for k in 1..=steps {
        rk4_step(&m, &mut x, &mut tmp, dt);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Blowup(k));
        }
        times.push(k as f64 * dt);
        norms.push(norm2(&x));
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        norms,
        sigma,
        dt,
    })
}

fn rk4_step(m: &Matrix, x: &mut [f64], tmp: &mut [f64], dt: f64) {
    let k1 = m.mul_vec(x);
    for i in 0..x.len() {
        tmp[i] = x[i] + 0.5 * dt * k1[i];
    }
    let k2 = m.mul_vec(tmp);
    for i in 0..x.len() {
        tmp[i] = x[i] + 0.5 * dt * k2[i];
    }
    let k3 = m.mul_vec(tmp);
    for i in 0..x.len() {
        tmp[i] = x[i] + dt * k3[i];
    }
    let k4 = m.mul_vec(tmp);
    for i in 0..x.len() {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEnvelope {
    /// `(‖X(dt)‖ − ‖X(0)‖) / dt`
    pub initial_growth_rate: f64,
    pub max_norm: f64,
    /// Norm never increases by more than `MONOTONE_TOL` in one step.
    pub monotone: bool,
}

pub fn norm_envelope(traj: &Trajectory) -> Result<NormEnvelope, SimError> {
    if traj.norms.len() < 2 {
        return Err(SimError::Empty);
    }
    let initial_growth_rate = (traj.norms[1] - traj.norms[0]) / traj.dt;
    let max_norm = traj.norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let monotone = traj.norms.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL);
    Ok(NormEnvelope {
        initial_growth_rate,
        max_norm,
        monotone,
    })
}
