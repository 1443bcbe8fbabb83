//! Grids over config fields.

use std::io::Write;
use std::str::FromStr;

use super::config::RunConfig;
use super::ensemble::{run_ensemble, EnsembleOptions, RunSummary};
use super::io::{csv_error, fmt_short};
use crate::error::{Error, Result};

/// One swept key and its values, written `key=v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, values) = s
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("sweep axis must be `key=v1,v2,...`, got `{s}`")))?;
        let key = key.trim().to_string();
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(Error::Argument(format!("empty value in sweep axis `{s}`")));
        }
        Ok(Self { key, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub values: Vec<String>,
    pub summary: RunSummary,
}

/// All configs of the Cartesian product, last axis fastest.
pub fn sweep_configs(base: &RunConfig, axes: &[SweepAxis]) -> Result<Vec<(Vec<String>, RunConfig)>> {
    if axes.is_empty() {
        return Err(Error::Argument("sweep needs at least one axis".into()));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.key == a.key) {
            return Err(Error::Argument(format!("axis `{}` given twice", a.key)));
        }
    }
    let n: usize = axes.iter().map(|a| a.values.len()).product();
    let mut out = Vec::with_capacity(n);
    for flat in 0..n {
        let mut rem = flat;
        let mut picks = vec![String::new(); axes.len()];
        for (slot, axis) in picks.iter_mut().zip(axes).rev() {
            *slot = axis.values[rem % axis.values.len()].clone();
            rem /= axis.values.len();
        }
        let mut config = base.clone();
        for (axis, value) in axes.iter().zip(&picks) {
            config.set(&axis.key, value)?;
        }
        config.validate()?;
        out.push((picks, config));
    }
    Ok(out)
}

/// Runs every grid point with the base seed.
pub fn run_sweep(base: &RunConfig, axes: &[SweepAxis], opts: &EnsembleOptions) -> Result<Vec<SweepPoint>> {
    let opts = EnsembleOptions {
        keep_records: false,
        ..*opts
    };
    sweep_configs(base, axes)?
        .into_iter()
        .map(|(values, config)| {
            run_ensemble(&config, &opts).map(|run| SweepPoint {
                values,
                summary: run.summary,
            })
        })
        .collect()
}

pub const SWEEP_STAT_COLUMNS: [&str; 10] = [
    "n_traj",
    "n_meas",
    "t1_hat_K",
    "t1_stderr_K",
    "gof_statistic",
    "gof_p_value",
    "v22_slope_m2",
    "v22_slope_rel_error",
    "eta1",
    "eta2",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_short).unwrap_or_default()
}

/// One row per grid point: the axis values as given, then the statistics.
/// Missing statistics are empty fields.
pub fn write_sweep_csv<W: Write>(out: W, axes: &[SweepAxis], points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = axes
        .iter()
        .map(|a| a.key.as_str())
        .chain(SWEEP_STAT_COLUMNS)
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for p in points {
        let s = &p.summary;
        let stats = [
            s.config.n_traj.to_string(),
            s.config.n_meas.to_string(),
            opt(s.t1_hat_k),
            opt(s.t1_stderr_k),
            opt(s.gof_statistic),
            opt(s.gof_p_value),
            opt(s.v22_slope_m2),
            opt(s.v22_slope_rel_error),
            fmt_short(s.eta1),
            fmt_short(s.eta2),
        ];
        w.write_record(p.values.iter().cloned().chain(stats)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        let a: SweepAxis = "dt_s=0.01, 0.1".parse().unwrap();
        assert_eq!(a.key, "dt_s");
        assert_eq!(a.values, vec!["0.01", "0.1"]);
        assert!("dt_s".parse::<SweepAxis>().is_err());
        assert!("dt_s=1,,2".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn grid_order_and_validation() {
        let base = RunConfig::default();
        let axes = vec![
            "temperature_K=0.05,0.1".parse().unwrap(),
            "dt_s=0.01,0.1,1".parse().unwrap(),
        ];
        let grid = sweep_configs(&base, &axes).unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[1].1.dt_s, 0.1);
        assert_eq!(grid[3].1.temperature_k, 0.1);
        assert!(sweep_configs(&base, &["bogus=1".parse().unwrap()]).is_err());
        assert!(sweep_configs(&base, &["dt_s=-1".parse().unwrap()]).is_err());
        assert!(sweep_configs(&base, &[axes[0].clone(), axes[0].clone()]).is_err());
        assert!(sweep_configs(&base, &[]).is_err());
    }

    #[test]
    fn sweep_rows() {
        let base = RunConfig {
            n_traj: 30,
            n_meas: 5,
            ..RunConfig::default()
        };
        let axes = vec!["meter_kind=qnd_x1,position".parse().unwrap()];
        let points = run_sweep(&base, &axes, &EnsembleOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &axes, &points).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("meter_kind,n_traj,n_meas,t1_hat_K"));
        assert!(lines[2].starts_with("position,30,5,"));
        // gof needs 100 samples
        assert_eq!(lines[1].split(',').nth(6), Some(""));
    }
}
