//! Trajectory ensembles and their summary statistics.

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::dynamics::{thermal_step, GaussianQuadState};
use crate::error::{Error, Result};
use crate::measurement::{measure, MeterSpec};
use crate::noise_budget::budget;
use crate::observables::OscillatorParams;
use crate::seeding::trajectory_stream;
use crate::stats::{
    estimate_t1, gof_boltzmann, heating_slope, GofOptions, SampleLabel, SampleSeries, DEFAULT_CALIBRATION_REPLICAS,
    MIN_FIT_SAMPLES, MIN_GOF_SAMPLES,
};

/// Post-measurement state after one step of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRow {
    pub step: usize,
    pub time: f64,
    pub outcome: f64,
    pub mean1: f64,
    pub mean2: f64,
    pub v11: f64,
    pub v22: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub index: u64,
    pub final_state: GaussianQuadState,
    /// Post-measurement `v22` after every step.
    pub v22_trace: Vec<f64>,
    /// Empty unless records were requested.
    pub rows: Vec<StepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleOptions {
    /// `None` lets the pool pick; ignored without the `parallel` feature.
    pub workers: Option<usize>,
    pub keep_records: bool,
    pub n_mc: usize,
    pub timing: bool,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            workers: None,
            keep_records: false,
            n_mc: DEFAULT_CALIBRATION_REPLICAS,
            timing: false,
        }
    }
}

/// Statistics of one ensemble. Fields that need more data than the run
/// produced are `None` and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    #[serde(flatten)]
    pub config: RunConfig,
    #[serde(rename = "t1_hat_K")]
    pub t1_hat_k: Option<f64>,
    #[serde(rename = "t1_stderr_K")]
    pub t1_stderr_k: Option<f64>,
    pub gof_statistic: Option<f64>,
    pub gof_p_value: Option<f64>,
    pub gof_n_mc: usize,
    pub v22_slope_m2: Option<f64>,
    pub v22_slope_rel_error: Option<f64>,
    pub eta1: f64,
    pub eta2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub records_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRun {
    pub summary: RunSummary,
    pub trajectories: Vec<Trajectory>,
}

impl EnsembleRun {
    pub fn finals_x1(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| t.final_state.mean1).collect()
    }

    pub fn finals_x2(&self) -> Vec<f64> {
        self.trajectories.iter().map(|t| t.final_state.mean2).collect()
    }
}

/// Validated pieces of a config needed per trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySetup {
    pub params: OscillatorParams,
    pub meter: MeterSpec,
    pub config_seed: u64,
    policy: crate::measurement::CollapsePolicy,
    dt: f64,
    n_meas: usize,
    burn_in: f64,
}

impl TrajectorySetup {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            params: config.oscillator()?,
            meter: config.meter()?,
            config_seed: config.seed,
            policy: config.collapse_policy,
            dt: config.dt_s,
            n_meas: config.n_meas,
            burn_in: config.burn_in_s,
        })
    }
}

/// Trajectory `index`: thermal start, optional burn-in, then `n_meas` rounds
/// of thermal evolution followed by a measurement.
pub fn simulate_trajectory(setup: &TrajectorySetup, index: u64, keep_records: bool) -> Result<Trajectory> {
    let mut rng = trajectory_stream(setup.config_seed, index);
    let mut state = GaussianQuadState::thermal(&setup.params);
    if setup.burn_in > 0.0 {
        state = thermal_step(&state, setup.burn_in, &setup.params, &mut rng)?;
    }
    let mut v22_trace = Vec::with_capacity(setup.n_meas);
    let mut rows = Vec::with_capacity(if keep_records { setup.n_meas } else { 0 });
    for step in 0..setup.n_meas {
        state = thermal_step(&state, setup.dt, &setup.params, &mut rng)?;
        let m = measure(&state, &setup.meter, setup.policy, &setup.params, &mut rng)?;
        state = m.state;
        v22_trace.push(state.v22);
        if keep_records {
            rows.push(StepRow {
                step,
                time: state.time,
                outcome: m.outcome,
                mean1: state.mean1,
                mean2: state.mean2,
                v11: state.v11,
                v22: state.v22,
            });
        }
    }
    Ok(Trajectory {
        index,
        final_state: state,
        v22_trace,
        rows,
    })
}

fn simulate_all(setup: &TrajectorySetup, n_traj: usize, keep_records: bool) -> Vec<Result<Trajectory>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_traj as u64)
            .into_par_iter()
            .map(|i| simulate_trajectory(setup, i, keep_records))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_traj as u64)
            .map(|i| simulate_trajectory(setup, i, keep_records))
            .collect()
    }
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Argument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T>(_workers: Option<usize>, job: impl FnOnce() -> T) -> Result<T> {
    Ok(job())
}

/// Mean of the per-step traces, summed in trajectory order.
pub fn mean_trace<'a>(traces: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for trace in traces {
        if sum.is_empty() {
            sum = vec![0.0; trace.len()];
        }
        for (s, v) in sum.iter_mut().zip(trace) {
            *s += v;
        }
        count += 1;
    }
    sum.iter().map(|s| s / count as f64).collect()
}

/// Statistics shared by `simulate` and `analyze`: Boltzmann fit and
/// goodness of fit on the final X1 values, heating slope of the mean `v22`
/// trace, and the noise budget of the config.
pub fn summarize(config: &RunConfig, finals_x1: &[f64], v22_mean: &[f64], n_mc: usize) -> Result<RunSummary> {
    let params = config.oscillator()?;
    let meter = config.meter()?;
    let series = SampleSeries::new(finals_x1.to_vec(), SampleLabel::X1)?;

    let (t1_hat_k, t1_stderr_k) = if series.len() >= MIN_FIT_SAMPLES {
        let fit = estimate_t1(&series, &params)?;
        (Some(fit.t1_hat), Some(fit.stderr))
    } else {
        (None, None)
    };
    let (gof_statistic, gof_p_value) = if series.len() >= MIN_GOF_SAMPLES {
        let gof = gof_boltzmann(
            &series,
            &params,
            &GofOptions {
                n_mc,
                seed: config.seed,
            },
        )?;
        (Some(gof.statistic), Some(gof.p_value))
    } else {
        (None, None)
    };
    let (v22_slope_m2, v22_slope_rel_error) = match heating_slope(v22_mean, meter.back_action(&params)) {
        Ok(h) => (Some(h.slope), Some(h.relative_error)),
        Err(Error::InsufficientData { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let report = budget(&config.budget_inputs())?;
    Ok(RunSummary {
        config: config.clone(),
        t1_hat_k,
        t1_stderr_k,
        gof_statistic,
        gof_p_value,
        gof_n_mc: n_mc,
        v22_slope_m2,
        v22_slope_rel_error,
        eta1: report.eta1,
        eta2: report.eta2,
        wall_time_s: None,
        records_file: None,
    })
}

pub fn run_ensemble(config: &RunConfig, opts: &EnsembleOptions) -> Result<EnsembleRun> {
    let setup = TrajectorySetup::new(config)?;
    let started = opts.timing.then(std::time::Instant::now);
    let (trajectories, summary) = with_workers(opts.workers, || -> Result<_> {
        let trajectories = simulate_all(&setup, config.n_traj, opts.keep_records)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let finals: Vec<f64> = trajectories.iter().map(|t| t.final_state.mean1).collect();
        let v22 = mean_trace(trajectories.iter().map(|t| t.v22_trace.as_slice()));
        let summary = summarize(config, &finals, &v22, opts.n_mc)?;
        Ok((trajectories, summary))
    })??;
    let mut summary = summary;
    summary.wall_time_s = started.map(|s| s.elapsed().as_secs_f64());
    Ok(EnsembleRun { summary, trajectories })
}
