//! Browser bindings: noise budget, a small trajectory ensemble, and the
//! energy histogram of its monitored quadrature.

use qndsim_core::harness::{run_ensemble, EnsembleOptions, RunConfig};
use qndsim_core::noise_budget::{budget, BudgetInputs};
use qndsim_core::stats::{energy_histogram, SampleLabel, SampleSeries, MIN_CALIBRATION_REPLICAS};
use qndsim_core::Result;
use wasm_bindgen::prelude::*;

fn js(e: qndsim_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn budget_values(temperature: f64, omega1: f64, tau1: f64, omega2: f64, tau2: f64, dt: f64, mass: f64) -> Result<Vec<f64>> {
    let r = budget(&BudgetInputs {
        temperature,
        omega1,
        tau1,
        omega2,
        tau2,
        dt,
        amplifier_quanta: 1.0,
        mass,
    })?;
    Ok(vec![r.eta1, r.eta2, r.delta_e_br, r.x_zp])
}

/// `[eta1, eta2, delta_e_br_J, x_zp_m]`.
#[wasm_bindgen(js_name = noiseBudget)]
pub fn noise_budget(
    temperature: f64,
    omega1: f64,
    tau1: f64,
    omega2: f64,
    tau2: f64,
    dt: f64,
    mass: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    budget_values(temperature, omega1, tau1, omega2, tau2, dt, mass).map_err(js)
}

/// Result of [`run_demo`]. Statistics that need more trajectories are NaN.
#[wasm_bindgen]
pub struct Demo {
    config: RunConfig,
    x1: Vec<f64>,
    x2: Vec<f64>,
    v22: Vec<f64>,
    v11: Vec<f64>,
    t1_hat: f64,
    t1_stderr: f64,
    p_value: f64,
    sigma_ba2: f64,
}

#[wasm_bindgen]
impl Demo {
    /// Final X1 means, m.
    #[wasm_bindgen(getter)]
    pub fn x1(&self) -> Vec<f64> {
        self.x1.clone()
    }

    /// Final X2 means, m.
    #[wasm_bindgen(getter)]
    pub fn x2(&self) -> Vec<f64> {
        self.x2.clone()
    }

    /// Ensemble-mean conditional variance of X2 after each measurement, m².
    #[wasm_bindgen(getter)]
    pub fn v22(&self) -> Vec<f64> {
        self.v22.clone()
    }

    /// Ensemble-mean conditional variance of X1 after each measurement, m².
    #[wasm_bindgen(getter)]
    pub fn v11(&self) -> Vec<f64> {
        self.v11.clone()
    }

    #[wasm_bindgen(getter, js_name = t1Hat)]
    pub fn t1_hat(&self) -> f64 {
        self.t1_hat
    }

    #[wasm_bindgen(getter, js_name = t1Stderr)]
    pub fn t1_stderr(&self) -> f64 {
        self.t1_stderr
    }

    #[wasm_bindgen(getter, js_name = pValue)]
    pub fn p_value(&self) -> f64 {
        self.p_value
    }

    /// Expected back-action per measurement, m².
    #[wasm_bindgen(getter, js_name = backActionVariance)]
    pub fn back_action_variance(&self) -> f64 {
        self.sigma_ba2
    }

    /// Flattened rows `[e_lo, e_hi, density, model_density, ...]` in J and 1/J.
    #[wasm_bindgen(js_name = energyHistogram)]
    pub fn energy_histogram(&self, n_bins: usize) -> std::result::Result<Vec<f64>, JsError> {
        self.histogram(n_bins).map_err(js)
    }
}

impl Demo {
    fn histogram(&self, n_bins: usize) -> Result<Vec<f64>> {
        let series = SampleSeries::new(self.x1.clone(), SampleLabel::X1)?;
        let h = energy_histogram(&series, &self.config.oscillator()?, n_bins)?;
        Ok(h.rows
            .iter()
            .flat_map(|r| [r.e_lo, r.e_hi, r.density, r.model_density])
            .collect())
    }
}

fn demo(
    meter_kind: &str,
    collapse_policy: &str,
    temperature: f64,
    sigma_m: f64,
    n_traj: usize,
    n_meas: usize,
    seed: u64,
) -> Result<Demo> {
    let mut config = RunConfig {
        temperature_k: temperature,
        sigma_m_m: sigma_m,
        n_traj,
        n_meas,
        seed,
        ..RunConfig::default()
    };
    config.set("meter_kind", meter_kind)?;
    config.set("collapse_policy", collapse_policy)?;
    config.validate()?;
    let opts = EnsembleOptions {
        keep_records: true,
        n_mc: MIN_CALIBRATION_REPLICAS,
        ..EnsembleOptions::default()
    };
    let run = run_ensemble(&config, &opts)?;
    let v11_traces: Vec<Vec<f64>> = run
        .trajectories
        .iter()
        .map(|t| t.rows.iter().map(|r| r.v11).collect())
        .collect();
    let v11 = qndsim_core::harness::mean_trace(v11_traces.iter().map(Vec::as_slice));
    let v22 = qndsim_core::harness::mean_trace(run.trajectories.iter().map(|t| t.v22_trace.as_slice()));
    let ba = config.meter()?.back_action(&config.oscillator()?);
    let s = &run.summary;
    Ok(Demo {
        x1: run.finals_x1(),
        x2: run.finals_x2(),
        v22,
        v11,
        t1_hat: s.t1_hat_k.unwrap_or(f64::NAN),
        t1_stderr: s.t1_stderr_k.unwrap_or(f64::NAN),
        p_value: s.gof_p_value.unwrap_or(f64::NAN),
        sigma_ba2: ba * ba,
        config,
    })
}

/// Runs an ensemble with the default oscillator (1 g, 10⁴ rad/s, τ1 = 10⁴ s,
/// Δt = 10 ms). `meter_kind` is `qnd_x1`, `qnd_x2` or `position`;
/// `collapse_policy` is `orthodox` or `no_conditioning`.
#[wasm_bindgen(js_name = runDemo)]
pub fn run_demo(
    meter_kind: &str,
    collapse_policy: &str,
    temperature: f64,
    sigma_m: f64,
    n_traj: usize,
    n_meas: usize,
    seed: u64,
) -> std::result::Result<Demo, JsError> {
    demo(meter_kind, collapse_policy, temperature, sigma_m, n_traj, n_meas, seed).map_err(js)
}
