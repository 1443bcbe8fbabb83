//! Brownian evolution of the oscillator in the rotating quadrature frame.
//!
//! The bath acts on each quadrature as an independent Ornstein–Uhlenbeck
//! process with amplitude decay `d = exp(−dt/2τ1)` (τ1 is the energy
//! relaxation time). The update is the exact discretisation, so the step size
//! never biases ensemble statistics.
//!
//! The state is the conditional Gaussian of one oscillator. The Brownian force
//! is a c-number force: it displaces the mean and leaves the spread alone,
//! apart from the damping contraction. Its variance budget is therefore split
//! as
//!
//! ```text
//! mean  ← d·mean + N(0, (V∞ − V_floor)·(1 − d²))
//! V     ← d²·V + V_floor·(1 − d²)·I
//! ```
//!
//! with `V_floor = 0` for the classical bath and `ħ/2mω1` for the quantum one.
//! The ensemble variance `Var(mean) + V` of each quadrature relaxes to `V∞`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::observables::{BathModel, OscillatorParams};

/// Conditional Gaussian state in the rotating frame. Lengths in m, variances
/// in m², time in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianQuadState {
    pub mean1: f64,
    pub mean2: f64,
    pub v11: f64,
    pub v22: f64,
    pub v12: f64,
    pub time: f64,
}

impl GaussianQuadState {
    pub fn new(mean1: f64, mean2: f64, v11: f64, v22: f64, v12: f64, time: f64) -> Result<Self> {
        let state = Self {
            mean1,
            mean2,
            v11,
            v22,
            v12,
            time,
        };
        state.check()?;
        Ok(state)
    }

    /// Thermal density state: zero mean, `V∞` in both quadratures.
    pub fn thermal(params: &OscillatorParams) -> Self {
        let v = stationary_variance(params);
        Self::centered(v)
    }

    /// Minimum-uncertainty (coherent) state at the origin.
    pub fn zero_point(params: &OscillatorParams) -> Self {
        Self::centered(params.zero_point_variance())
    }

    /// Point-like classical state.
    pub fn sharp(mean1: f64, mean2: f64) -> Self {
        Self {
            mean1,
            mean2,
            v11: 0.0,
            v22: 0.0,
            v12: 0.0,
            time: 0.0,
        }
    }

    fn centered(v: f64) -> Self {
        Self {
            mean1: 0.0,
            mean2: 0.0,
            v11: v,
            v22: v,
            v12: 0.0,
            time: 0.0,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.v11 * self.v22 - self.v12 * self.v12
    }

    pub fn is_finite(&self) -> bool {
        [self.mean1, self.mean2, self.v11, self.v22, self.v12, self.time]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn is_psd(&self) -> bool {
        self.v11 >= 0.0 && self.v22 >= 0.0 && self.determinant() >= 0.0
    }

    /// Finite and positive semi-definite, or a state-domain error.
    pub fn check(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::StateDomain(format!("non-finite entries in {self:?}")));
        }
        if !self.is_psd() {
            return Err(Error::StateDomain(format!(
                "covariance not positive semi-definite (v11={}, v22={}, v12={})",
                self.v11, self.v22, self.v12
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub e1: f64,
    pub e2: f64,
    pub total: f64,
}

/// Equilibrium quadrature variance `V∞`.
pub fn stationary_variance(params: &OscillatorParams) -> f64 {
    match params.bath() {
        BathModel::Classical => K_B * params.temperature() / (params.mass() * params.omega1().powi(2)),
        BathModel::Quantum => {
            let x = HBAR * params.omega1() / (2.0 * K_B * params.temperature());
            params.zero_point_variance() / x.tanh()
        }
    }
}

/// Covariance the bath drives a single state towards.
pub fn thermal_floor(params: &OscillatorParams) -> f64 {
    match params.bath() {
        BathModel::Classical => 0.0,
        BathModel::Quantum => params.zero_point_variance(),
    }
}

/// Exact OU update over `dt`. Draws two standard normals from `rng`.
pub fn thermal_step<R: Rng + ?Sized>(
    state: &GaussianQuadState,
    dt: f64,
    params: &OscillatorParams,
    rng: &mut R,
) -> Result<GaussianQuadState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Argument(format!("thermal step needs dt > 0, got {dt}")));
    }
    let v_inf = stationary_variance(params);
    let floor = thermal_floor(params);
    let decay2 = (-dt / params.tau1()).exp();
    let decay = (-dt / (2.0 * params.tau1())).exp();
    let gain = -(-dt / params.tau1()).exp_m1();
    let kick = ((v_inf - floor) * gain).sqrt();

    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    Ok(GaussianQuadState {
        mean1: decay * state.mean1 + kick * z1,
        mean2: decay * state.mean2 + kick * z2,
        v11: decay2 * state.v11 + floor * gain,
        v22: decay2 * state.v22 + floor * gain,
        v12: decay2 * state.v12,
        time: state.time + dt,
    })
}

/// Free motion: quadratures are constants, only the clock advances.
pub fn free_evolve(state: &GaussianQuadState, dt: f64) -> Result<GaussianQuadState> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(Error::Argument(format!("free evolution needs dt >= 0, got {dt}")));
    }
    Ok(GaussianQuadState {
        time: state.time + dt,
        ..*state
    })
}

/// Mean energy per quadrature, `½mω1²(mean² + v)`.
pub fn energy_of(state: &GaussianQuadState, params: &OscillatorParams) -> EnergyReport {
    let k = 0.5 * params.mass() * params.omega1().powi(2);
    let e1 = k * (state.mean1 * state.mean1 + state.v11);
    let e2 = k * (state.mean2 * state.mean2 + state.v22);
    EnergyReport {
        e1,
        e2,
        total: e1 + e2,
    }
}
