//! Gaussian meter models and stroboscopic schedules.
//!
//! A meter reads `y = u·X + noise`, where `u` is a unit vector in the
//! `(X1, X2)` plane and the noise is `N(0, sigma_m²)`. Under the orthodox
//! policy the state is conditioned on `y` (Kalman update); under
//! `no_conditioning` it is not. In both cases the meter injects
//! quantum-limited back-action of variance `(ħ/2mω1·sigma_m)²` along the
//! direction orthogonal to `u`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::{thermal_step, GaussianQuadState};
use crate::error::{require_positive, Error, Result};
use crate::observables::OscillatorParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeterKind {
    /// Back-action evading readout of `X1`.
    QndX1,
    /// Back-action evading readout of `X2`.
    QndX2,
    /// Instantaneous position `x = X1·cos ω1t + X2·sin ω1t`.
    Position,
}

impl MeterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeterKind::QndX1 => "qnd_x1",
            MeterKind::QndX2 => "qnd_x2",
            MeterKind::Position => "position",
        }
    }
}

impl std::str::FromStr for MeterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qnd_x1" => Ok(MeterKind::QndX1),
            "qnd_x2" => Ok(MeterKind::QndX2),
            "position" => Ok(MeterKind::Position),
            other => Err(Error::parameter(
                "meter_kind",
                format!("expected qnd_x1, qnd_x2 or position, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterSpec {
    kind: MeterKind,
    sigma_m: f64,
}

impl MeterSpec {
    pub fn new(kind: MeterKind, sigma_m: f64) -> Result<Self> {
        require_positive("sigma_m", sigma_m)?;
        Ok(Self { kind, sigma_m })
    }

    pub fn kind(&self) -> MeterKind {
        self.kind
    }

    /// Readout noise standard deviation, m.
    pub fn sigma_m(&self) -> f64 {
        self.sigma_m
    }

    /// Heisenberg-limited back-action standard deviation `ħ/(2mω1·sigma_m)`.
    pub fn back_action(&self, params: &OscillatorParams) -> f64 {
        params.zero_point_variance() / self.sigma_m
    }
}

/// How the state responds to an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapsePolicy {
    /// Condition on the outcome (state-vector reduction).
    #[default]
    Orthodox,
    /// Outcome drawn from the same predictive law, state left unconditioned.
    /// A naive foil for checking that the detector has power.
    NoConditioning,
}

impl CollapsePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            CollapsePolicy::Orthodox => "orthodox",
            CollapsePolicy::NoConditioning => "no_conditioning",
        }
    }
}

impl std::str::FromStr for CollapsePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthodox" => Ok(CollapsePolicy::Orthodox),
            "no_conditioning" => Ok(CollapsePolicy::NoConditioning),
            other => Err(Error::parameter(
                "collapse_policy",
                format!("expected orthodox or no_conditioning, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub time: f64,
    pub kind: MeterKind,
    pub outcome: f64,
    pub pre_v11: f64,
    pub post_v11: f64,
    pub pre_v22: f64,
    pub post_v22: f64,
}

/// Unit vector `u` such that the meter reads `u·(X1, X2)` at time `t`.
pub fn measurement_direction(kind: MeterKind, t: f64, params: &OscillatorParams) -> [f64; 2] {
    match kind {
        MeterKind::QndX1 => [1.0, 0.0],
        MeterKind::QndX2 => [0.0, 1.0],
        MeterKind::Position => {
            let (s, c) = (params.omega1() * t).sin_cos();
            [c, s]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub outcome: f64,
    pub state: GaussianQuadState,
    pub record: MeasurementRecord,
}

/// One readout at `state.time`.
pub fn measure<R: Rng + ?Sized>(
    state: &GaussianQuadState,
    meter: &MeterSpec,
    policy: CollapsePolicy,
    params: &OscillatorParams,
    rng: &mut R,
) -> Result<Measured> {
    state.check()?;
    let [c, s] = measurement_direction(meter.kind, state.time, params);
    let sigma2 = meter.sigma_m * meter.sigma_m;
    let ba = meter.back_action(params);
    let ba2 = ba * ba;
    if !ba2.is_finite() {
        return Err(Error::Numerical(format!(
            "back-action variance overflows for sigma_m = {:e} m",
            meter.sigma_m
        )));
    }

    // Covariance in the (u, u⊥) frame, u⊥ = (−s, c).
    let (v11, v22, v12) = (state.v11, state.v22, state.v12);
    let along = c * c * v11 + 2.0 * c * s * v12 + s * s * v22;
    let cross = -c * s * v11 + (c * c - s * s) * v12 + c * s * v22;
    let across = s * s * v11 - 2.0 * c * s * v12 + c * c * v22;

    let predicted = c * state.mean1 + s * state.mean2;
    let spread = along + sigma2;
    let z: f64 = rng.sample(StandardNormal);
    let outcome = predicted + spread.sqrt() * z;

    let (mut mean1, mut mean2) = (state.mean1, state.mean2);
    let (along, cross, mut across) = match policy {
        CollapsePolicy::Orthodox => {
            let innovation = (outcome - predicted) / spread;
            mean1 += (c * v11 + s * v12) * innovation;
            mean2 += (c * v12 + s * v22) * innovation;
            let shrink = sigma2 / spread;
            (along * shrink, cross * shrink, across - cross * cross / spread)
        }
        CollapsePolicy::NoConditioning => (along, cross, across),
    };
    across += ba2;

    let next = GaussianQuadState {
        mean1,
        mean2,
        v11: c * c * along - 2.0 * c * s * cross + s * s * across,
        v22: s * s * along + 2.0 * c * s * cross + c * c * across,
        v12: c * s * along + (c * c - s * s) * cross - s * c * across,
        time: state.time,
    };
    if !next.is_finite() || !outcome.is_finite() {
        return Err(Error::Numerical(format!("non-finite state after measurement: {next:?}")));
    }
    let record = MeasurementRecord {
        time: state.time,
        kind: meter.kind,
        outcome,
        pre_v11: v11,
        post_v11: next.v11,
        pre_v22: v22,
        post_v22: next.v22,
    };
    Ok(Measured {
        outcome,
        state: next,
        record,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub records: Vec<MeasurementRecord>,
    pub final_state: GaussianQuadState,
}

/// `n_meas` rounds of `thermal_step(dt)` followed by `measure`.
pub fn run_schedule<R: Rng + ?Sized>(
    initial: &GaussianQuadState,
    meter: &MeterSpec,
    policy: CollapsePolicy,
    params: &OscillatorParams,
    dt: f64,
    n_meas: usize,
    rng: &mut R,
) -> Result<Schedule> {
    if n_meas == 0 {
        return Err(Error::Argument("schedule needs at least one measurement".into()));
    }
    let mut state = *initial;
    let mut records = Vec::with_capacity(n_meas);
    for _ in 0..n_meas {
        state = thermal_step(&state, dt, params, rng)?;
        let m = measure(&state, meter, policy, params, rng)?;
        records.push(m.record);
        state = m.state;
    }
    Ok(Schedule {
        records,
        final_state: state,
    })
}
