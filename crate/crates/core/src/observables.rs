//! Linear observables on the oscillator phase space.
//!
//! Every observable handled here is first degree in `x` and `p`, so the
//! operator commutator of two of them is a c-number: `[A, B] = iħ·s` with
//! `s = a.c_x·b.c_p − a.c_p·b.c_x`. We carry only the real symplectic value
//! `s` (units s/kg). Zero/non-zero classification of `s` is all the QND
//! conditions need.
//!
//! Quadratures use the rotating-frame convention
//!
//! ```text
//! X1 = x·cos(ω1 t) − (p/mω1)·sin(ω1 t)
//! X2 = x·sin(ω1 t) + (p/mω1)·cos(ω1 t)
//! ```
//!
//! which makes both of them constants of the free motion.

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{require_positive, Error, Result};

/// Relative tolerance for QND classification, in units of `1/(m·ω1)`.
pub const DEFAULT_QND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BathModel {
    /// Equipartition: `V∞ = k_B·T/(m·ω1²)`.
    #[default]
    Classical,
    /// Zero-point floored: `V∞ = (ħ/2mω1)·coth(ħω1/2k_BT)`.
    Quantum,
}

impl BathModel {
    pub fn as_str(self) -> &'static str {
        match self {
            BathModel::Classical => "classical",
            BathModel::Quantum => "quantum",
        }
    }
}

impl std::str::FromStr for BathModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(BathModel::Classical),
            "quantum" => Ok(BathModel::Quantum),
            other => Err(Error::parameter(
                "bath_model",
                format!("expected `classical` or `quantum`, got `{other}`"),
            )),
        }
    }
}

/// Mechanical oscillator and its thermal bath. Always valid once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    omega1: f64,
    tau1: f64,
    temperature: f64,
    bath: BathModel,
}

impl OscillatorParams {
    /// `tau1` is the energy relaxation time; amplitudes relax at `2·tau1`.
    pub fn new(mass: f64, omega1: f64, tau1: f64, temperature: f64, bath: BathModel) -> Result<Self> {
        require_positive("mass", mass)?;
        require_positive("omega1", omega1)?;
        require_positive("tau1", tau1)?;
        require_positive("temperature", temperature)?;
        Ok(Self {
            mass,
            omega1,
            tau1,
            temperature,
            bath,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn bath(&self) -> BathModel {
        self.bath
    }

    /// `m·ω1`, the factor converting momentum to a length-valued quadrature.
    pub fn m_omega(&self) -> f64 {
        self.mass * self.omega1
    }

    /// Natural commutator scale `1/(m·ω1)`, i.e. `|[X1, X2]|/ħ`.
    pub fn commutator_scale(&self) -> f64 {
        1.0 / self.m_omega()
    }

    /// `ħ/(2mω1)`: the quadrature variance of the ground state, and the
    /// square root of the smallest allowed `v11·v22 − v12²`.
    pub fn zero_point_variance(&self) -> f64 {
        HBAR / (2.0 * self.m_omega())
    }
}

/// `c_x·x + c_p·p`. `c_p` carries units s/kg so the observable is a length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearObservable {
    c_x: f64,
    c_p: f64,
}

impl LinearObservable {
    pub fn new(c_x: f64, c_p: f64) -> Result<Self> {
        if !c_x.is_finite() || !c_p.is_finite() {
            return Err(Error::Argument(format!(
                "observable coefficients must be finite, got ({c_x}, {c_p})"
            )));
        }
        if c_x == 0.0 && c_p == 0.0 {
            return Err(Error::Argument("observable must not be identically zero".into()));
        }
        Ok(Self { c_x, c_p })
    }

    pub fn c_x(&self) -> f64 {
        self.c_x
    }

    pub fn c_p(&self) -> f64 {
        self.c_p
    }

    /// Position `x`.
    pub fn position() -> Self {
        Self { c_x: 1.0, c_p: 0.0 }
    }

    /// Momentum scaled to a length, `p/(m·ω1)`.
    pub fn scaled_momentum(params: &OscillatorParams) -> Self {
        Self {
            c_x: 0.0,
            c_p: 1.0 / params.m_omega(),
        }
    }

    /// Schrödinger-picture form of `X1` at time `t`.
    pub fn quadrature1_at(t: f64, params: &OscillatorParams) -> Self {
        let (s, c) = (params.omega1 * t).sin_cos();
        Self {
            c_x: c,
            c_p: -(s / params.m_omega()),
        }
    }

    /// Schrödinger-picture form of `X2` at time `t`.
    pub fn quadrature2_at(t: f64, params: &OscillatorParams) -> Self {
        let (s, c) = (params.omega1 * t).sin_cos();
        Self {
            c_x: s,
            c_p: c / params.m_omega(),
        }
    }

    /// `alpha·self + beta·other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        Self::new(
            alpha * self.c_x + beta * other.c_x,
            alpha * self.c_p + beta * other.c_p,
        )
    }
}

/// An observable family indexed by measurement time.
///
/// Quadratures carry explicit time dependence in the Schrödinger picture;
/// `x`, `p` and fixed combinations do not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Position,
    Momentum,
    Quadrature1,
    Quadrature2,
    Linear(LinearObservable),
}

impl Observable {
    pub fn schrodinger_at(&self, t: f64, params: &OscillatorParams) -> LinearObservable {
        match self {
            Observable::Position => LinearObservable::position(),
            Observable::Momentum => LinearObservable::scaled_momentum(params),
            Observable::Quadrature1 => LinearObservable::quadrature1_at(t, params),
            Observable::Quadrature2 => LinearObservable::quadrature2_at(t, params),
            Observable::Linear(obs) => *obs,
        }
    }

    /// The operator measured at `t`, written in initial-time `x`, `p`.
    pub fn heisenberg_at(&self, t: f64, params: &OscillatorParams) -> Result<LinearObservable> {
        heisenberg_evolve(&self.schrodinger_at(t, params), t, params)
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    /// Accepts `x`, `p`, `x1`, `x2`, or `linear:<c_x>,<c_p>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Observable::Position),
            "p" => Ok(Observable::Momentum),
            "x1" | "X1" => Ok(Observable::Quadrature1),
            "x2" | "X2" => Ok(Observable::Quadrature2),
            other => {
                let coeffs = other.strip_prefix("linear:").ok_or_else(|| {
                    Error::Argument(format!(
                        "unknown observable `{other}` (expected x, p, x1, x2 or linear:<c_x>,<c_p>)"
                    ))
                })?;
                let parsed: Vec<f64> = coeffs
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Argument(format!("bad coefficient in `{other}`: {e}")))?;
                match parsed.as_slice() {
                    [c_x, c_p] => Ok(Observable::Linear(LinearObservable::new(*c_x, *c_p)?)),
                    _ => Err(Error::Argument(format!("`{other}` needs exactly two coefficients"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratures {
    pub x1: f64,
    pub x2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

pub fn quadratures_of(point: PhasePoint, t: f64, params: &OscillatorParams) -> Quadratures {
    let (s, c) = (params.omega1 * t).sin_cos();
    let q = point.p / params.m_omega();
    Quadratures {
        x1: point.x * c - q * s,
        x2: point.x * s + q * c,
    }
}

pub fn phase_point_of(quad: Quadratures, t: f64, params: &OscillatorParams) -> PhasePoint {
    let (s, c) = (params.omega1 * t).sin_cos();
    PhasePoint {
        x: quad.x1 * c + quad.x2 * s,
        p: params.m_omega() * (quad.x2 * c - quad.x1 * s),
    }
}

/// Re-express `c_x·x(t) + c_p·p(t)` in initial-time operators using the free
/// harmonic flow.
pub fn heisenberg_evolve(obs: &LinearObservable, t: f64, params: &OscillatorParams) -> Result<LinearObservable> {
    if !t.is_finite() {
        return Err(Error::Argument(format!("evolution time must be finite, got {t}")));
    }
    let k = params.m_omega();
    let (s, c) = (params.omega1 * t).sin_cos();
    // `s / k` is formed once so that X1(t) evolves to an exactly zero c_p.
    let s_over_k = s / k;
    LinearObservable::new(
        obs.c_x * c - obs.c_p * (k * s),
        obs.c_x * s_over_k + obs.c_p * c,
    )
}

/// Symplectic value `s` with `[a, b] = iħ·s`.
pub fn commutator_symplectic(a: &LinearObservable, b: &LinearObservable) -> f64 {
    a.c_x * b.c_p - a.c_p * b.c_x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QndVerdict {
    pub is_qnd: bool,
    /// Largest `|s|` over all pairs, s/kg.
    pub max_violation: f64,
    /// `1/(m·ω1)`, the scale `tol` is relative to.
    pub scale: f64,
}

impl QndVerdict {
    pub fn relative_violation(&self) -> f64 {
        self.max_violation / self.scale
    }
}

/// Pairwise self-commutation of the Heisenberg images `O(t_i)`.
pub fn is_qnd_sequence(obs: &Observable, times: &[f64], params: &OscillatorParams, tol: f64) -> Result<QndVerdict> {
    if times.len() < 2 {
        return Err(Error::Argument(format!(
            "QND sequence check needs at least 2 times, got {}",
            times.len()
        )));
    }
    let evolved = times
        .iter()
        .map(|&t| obs.heisenberg_at(t, params))
        .collect::<Result<Vec<_>>>()?;
    let mut max_violation = 0.0_f64;
    for (i, a) in evolved.iter().enumerate() {
        for b in &evolved[i + 1..] {
            max_violation = max_violation.max(commutator_symplectic(a, b).abs());
        }
    }
    let scale = params.commutator_scale();
    Ok(QndVerdict {
        is_qnd: max_violation <= tol * scale,
        max_violation,
        scale,
    })
}

/// Whether a bilinear coupling `g·O_sys ⊗ Q_meter` commutes with the
/// monitored observable at time `t`. Only the system factor matters.
pub fn is_interaction_qnd(
    system_coupling: &Observable,
    monitored: &Observable,
    t: f64,
    params: &OscillatorParams,
    tol: f64,
) -> Result<bool> {
    let coupling = system_coupling.heisenberg_at(t, params)?;
    let target = monitored.heisenberg_at(t, params)?;
    Ok(commutator_symplectic(&coupling, &target).abs() <= tol * params.commutator_scale())
}
