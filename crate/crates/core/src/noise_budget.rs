//! Feasibility arithmetic: thermal noise quanta accumulated per measurement
//! interval in the mechanical and electrical modes, plus the zero-point
//! displacement of the test mass.

use crate::constants::{HBAR, K_B};
use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetInputs {
    /// K
    pub temperature: f64,
    /// Mechanical angular frequency, rad/s.
    pub omega1: f64,
    /// Mechanical energy relaxation time, s.
    pub tau1: f64,
    /// Electrical angular frequency, rad/s.
    pub omega2: f64,
    /// Electrical relaxation time, s.
    pub tau2: f64,
    /// Measurement interval, s.
    pub dt: f64,
    /// Amplifier noise quanta (passed through).
    pub amplifier_quanta: f64,
    /// kg; only used for the zero-point displacement.
    pub mass: f64,
}

impl BudgetInputs {
    pub fn validate(&self) -> Result<()> {
        require_positive("temperature", self.temperature)?;
        require_positive("omega1", self.omega1)?;
        require_positive("tau1", self.tau1)?;
        require_positive("omega2", self.omega2)?;
        require_positive("tau2", self.tau2)?;
        require_positive("dt", self.dt)?;
        require_positive("amplifier_quanta", self.amplifier_quanta)?;
        require_positive("mass", self.mass)?;
        Ok(())
    }
}

impl Default for BudgetInputs {
    /// Low-temperature end of the quoted operating ranges.
    fn default() -> Self {
        Self {
            temperature: 0.05,
            omega1: 1e4,
            tau1: 1e4,
            omega2: 1e8,
            tau2: 1.0,
            dt: 1e-2,
            amplifier_quanta: 1.0,
            mass: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetReport {
    pub eta1: f64,
    pub eta2: f64,
    pub eta_a: f64,
    /// Brownian energy drift over `dt`, J.
    pub delta_e_br: f64,
    /// Zero-point displacement, m.
    pub x_zp: f64,
}

/// Brownian drift quanta of a mode: `(k_B·T/ħω)·(dt/τ)`.
fn drift_quanta(temperature: f64, omega: f64, dt: f64, tau: f64) -> f64 {
    (K_B * temperature / (HBAR * omega)) * (dt / tau)
}

/// Mechanical Brownian drift per interval in units of `ħω1`.
pub fn eta1(inputs: &BudgetInputs) -> f64 {
    drift_quanta(inputs.temperature, inputs.omega1, inputs.dt, inputs.tau1)
}

/// Electrical-mode equivalent of [`eta1`].
pub fn eta2(inputs: &BudgetInputs) -> f64 {
    drift_quanta(inputs.temperature, inputs.omega2, inputs.dt, inputs.tau2)
}

/// `√(ħ/(m·ω))`.
pub fn zero_point_displacement(mass: f64, omega: f64) -> Result<f64> {
    require_positive("mass", mass)?;
    require_positive("omega", omega)?;
    Ok((HBAR / (mass * omega)).sqrt())
}

pub fn budget(inputs: &BudgetInputs) -> Result<BudgetReport> {
    inputs.validate()?;
    let eta1 = eta1(inputs);
    Ok(BudgetReport {
        eta1,
        eta2: eta2(inputs),
        eta_a: inputs.amplifier_quanta,
        delta_e_br: eta1 * (HBAR * inputs.omega1),
        x_zp: zero_point_displacement(inputs.mass, inputs.omega1)?,
    })
}

/// Axis values for a budget sweep. Every axis needs at least one value.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetGrid {
    pub temperature: Vec<f64>,
    pub omega1: Vec<f64>,
    pub tau1: Vec<f64>,
    pub omega2: Vec<f64>,
    pub tau2: Vec<f64>,
    pub dt: Vec<f64>,
    pub amplifier_quanta: Vec<f64>,
    pub mass: Vec<f64>,
}

impl BudgetGrid {
    pub fn single(inputs: BudgetInputs) -> Self {
        Self {
            temperature: vec![inputs.temperature],
            omega1: vec![inputs.omega1],
            tau1: vec![inputs.tau1],
            omega2: vec![inputs.omega2],
            tau2: vec![inputs.tau2],
            dt: vec![inputs.dt],
            amplifier_quanta: vec![inputs.amplifier_quanta],
            mass: vec![inputs.mass],
        }
    }

    pub fn len(&self) -> usize {
        self.axes().iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axes(&self) -> [&[f64]; 8] {
        [
            &self.temperature,
            &self.omega1,
            &self.tau1,
            &self.omega2,
            &self.tau2,
            &self.dt,
            &self.amplifier_quanta,
            &self.mass,
        ]
    }

    /// Grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<BudgetInputs> {
        let axes = self.axes();
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        for flat in 0..n {
            let mut rem = flat;
            let mut pick = [0.0; 8];
            for (slot, axis) in pick.iter_mut().zip(axes.iter()).rev() {
                *slot = axis[rem % axis.len()];
                rem /= axis.len();
            }
            out.push(BudgetInputs {
                temperature: pick[0],
                omega1: pick[1],
                tau1: pick[2],
                omega2: pick[3],
                tau2: pick[4],
                dt: pick[5],
                amplifier_quanta: pick[6],
                mass: pick[7],
            });
        }
        out
    }
}

pub fn budget_sweep(grid: &BudgetGrid) -> Result<Vec<(BudgetInputs, BudgetReport)>> {
    if grid.is_empty() {
        return Err(Error::Argument("budget sweep grid is empty".into()));
    }
    grid.points()
        .into_iter()
        .map(|p| budget(&p).map(|r| (p, r)))
        .collect()
}
