//! Boltzmann statistics of the monitored quadrature.
//!
//! The equilibrium law for one quadrature is `ρ1 ∝ exp(−E1/k_B·T1)` with
//! `E1 = ½·m·ω1²·X1²`. That density is with respect to `dX1`, so it says `X1`
//! is Gaussian with variance `k_B·T1/(m·ω1²)`. Read as a density over the
//! values of `E1` it is the chi-square(1) law `Gamma(½, k_B·T1)`, which is not
//! exponential; fitting an exponential to `E1` samples would reject the very
//! model under test. The goodness-of-fit test here therefore works on the
//! `X1` marginal, and [`energy_histogram`] overlays the Gamma(½) density.
//!
//! The scale `T1` is estimated from the same data, so asymptotic
//! Kolmogorov–Smirnov tables are wrong; p-values come from a Lilliefors-style
//! Monte Carlo calibration instead. The statistic is scale-free under the
//! null, so replicas are drawn from `N(0, 1)`.

use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::{erf, erfc};

use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::observables::OscillatorParams;
use crate::seeding::calibration_stream;

/// Smallest series accepted by [`estimate_t1`].
pub const MIN_FIT_SAMPLES: usize = 30;
/// Smallest series accepted by [`gof_boltzmann`].
pub const MIN_GOF_SAMPLES: usize = 100;
/// Smallest calibration ensemble accepted by [`gof_boltzmann`].
pub const MIN_CALIBRATION_REPLICAS: usize = 1000;
pub const DEFAULT_CALIBRATION_REPLICAS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLabel {
    X1,
    X2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    values: Vec<f64>,
    label: SampleLabel,
}

impl SampleSeries {
    pub fn new(values: Vec<f64>, label: SampleLabel) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("sample series contains non-finite value {bad}")));
        }
        Ok(Self { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> SampleLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoltzmannFit {
    /// K
    pub t1_hat: f64,
    /// K
    pub stderr: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
    pub n_mc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GofOptions {
    pub n_mc: usize,
    pub seed: u64,
}

impl Default for GofOptions {
    fn default() -> Self {
        Self {
            n_mc: DEFAULT_CALIBRATION_REPLICAS,
            seed: 0,
        }
    }
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// Effective temperature from `⟨E1⟩ = ½·k_B·T1`.
pub fn estimate_t1(series: &SampleSeries, params: &OscillatorParams) -> Result<BoltzmannFit> {
    let n = series.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: n,
        });
    }
    let first = series.values[0];
    let var = sample_variance(&series.values);
    if var <= 0.0 || series.values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateSeries);
    }
    let t1_hat = params.mass() * params.omega1().powi(2) * var / K_B;
    Ok(BoltzmannFit {
        t1_hat,
        stderr: t1_hat * (2.0 / (n as f64 - 1.0)).sqrt(),
        n,
    })
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// KS distance between `sorted` and `N(0, sd²)`.
fn ks_distance(sorted: &[f64], sd: f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
        let f = normal_cdf(x / sd);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    })
}

/// KS statistic of `values` against the zero-mean normal with the variance
/// estimated from `values` itself.
fn fitted_ks(values: &mut [f64]) -> f64 {
    let sd = sample_variance(values).sqrt();
    values.sort_unstable_by(f64::total_cmp);
    ks_distance(values, sd)
}

fn null_statistic(n: usize, seed: u64, replica: u64) -> f64 {
    let mut rng = calibration_stream(seed, replica);
    let mut draws: Vec<f64> = StandardNormal.sample_iter(&mut rng).take(n).collect();
    fitted_ks(&mut draws)
}

fn count_exceedances(observed: f64, n: usize, opts: &GofOptions) -> usize {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..opts.n_mc as u64)
            .into_par_iter()
            .filter(|&r| null_statistic(n, opts.seed, r) >= observed)
            .count()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..opts.n_mc as u64)
            .filter(|&r| null_statistic(n, opts.seed, r) >= observed)
            .count()
    }
}

/// Tests `X ~ N(0, k_B·T1/mω1²)` with `T1` fitted from the same data.
pub fn gof_boltzmann(series: &SampleSeries, params: &OscillatorParams, opts: &GofOptions) -> Result<GofReport> {
    let n = series.len();
    if n < MIN_GOF_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_GOF_SAMPLES,
            got: n,
        });
    }
    if opts.n_mc < MIN_CALIBRATION_REPLICAS {
        return Err(Error::Argument(format!(
            "calibration needs at least {MIN_CALIBRATION_REPLICAS} replicas, got {}",
            opts.n_mc
        )));
    }
    let fit = estimate_t1(series, params)?;
    let sd = (K_B * fit.t1_hat / (params.mass() * params.omega1().powi(2))).sqrt();
    let mut sorted = series.values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let statistic = ks_distance(&sorted, sd);

    let exceed = count_exceedances(statistic, n, opts);
    Ok(GofReport {
        statistic,
        p_value: (1 + exceed) as f64 / (opts.n_mc + 1) as f64,
        method: "lilliefors-ks-zero-mean-normal".to_string(),
        n_mc: opts.n_mc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingFit {
    /// m² per measurement.
    pub slope: f64,
    pub relative_error: f64,
}

/// Least-squares slope of the variance trace against measurement index,
/// compared with the expected per-measurement back-action `sigma_ba²`.
pub fn heating_slope(var_by_step: &[f64], sigma_ba: f64) -> Result<HeatingFit> {
    const MIN_POINTS: usize = 5;
    if var_by_step.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: var_by_step.len(),
        });
    }
    let n = var_by_step.len() as f64;
    let k_mean = (n - 1.0) / 2.0;
    let v_mean = var_by_step.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, v) in var_by_step.iter().enumerate() {
        let dk = k as f64 - k_mean;
        sxy += dk * (v - v_mean);
        sxx += dk * dk;
    }
    let slope = sxy / sxx;
    let expected = sigma_ba * sigma_ba;
    Ok(HeatingFit {
        slope,
        relative_error: (slope - expected).abs() / expected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRow {
    /// J
    pub e_lo: f64,
    /// J
    pub e_hi: f64,
    pub count: usize,
    /// Empirical density, 1/J.
    pub density: f64,
    /// Bin-averaged Gamma(½, k_B·T1) density, 1/J.
    pub model_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyHistogram {
    pub fit: BoltzmannFit,
    pub rows: Vec<HistogramRow>,
}

/// Histogram of `E1 = ½mω1²X1²` over `[0, max E1]` with the fitted model.
pub fn energy_histogram(series: &SampleSeries, params: &OscillatorParams, n_bins: usize) -> Result<EnergyHistogram> {
    if !(5..=1_000_000).contains(&n_bins) {
        return Err(Error::Binning(format!("need 5..=1e6 bins, got {n_bins}")));
    }
    let fit = estimate_t1(series, params)?;
    let k = 0.5 * params.mass() * params.omega1().powi(2);
    let energies: Vec<f64> = series.values.iter().map(|x| k * x * x).collect();
    let e_max = energies.iter().cloned().fold(0.0, f64::max);
    if e_max <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let width = e_max / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for e in &energies {
        let bin = ((e / width) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let kt = K_B * fit.t1_hat;
    let cdf = |e: f64| erf((e / kt).sqrt());
    let n = energies.len() as f64;
    let rows = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let e_lo = i as f64 * width;
            let e_hi = if i + 1 == n_bins { e_max } else { (i + 1) as f64 * width };
            HistogramRow {
                e_lo,
                e_hi,
                count,
                density: count as f64 / (n * (e_hi - e_lo)),
                model_density: (cdf(e_hi) - cdf(e_lo)) / (e_hi - e_lo),
            }
        })
        .collect();
    Ok(EnergyHistogram { fit, rows })
}
