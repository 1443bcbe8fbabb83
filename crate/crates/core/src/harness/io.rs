//! Record, summary and budget file formats.
//!
//! Record files carry 17 significant digits. Budget and sweep tables use the
//! shortest exponent form that round-trips. Both parse back to the same `f64`.

use std::io::{Read, Write};

use super::config::RunConfig;
use super::ensemble::{mean_trace, summarize, RunSummary, Trajectory};
use crate::error::{Error, Result};
use crate::noise_budget::{BudgetInputs, BudgetReport};

pub const RECORD_HEADER: [&str; 8] = [
    "traj_id",
    "step",
    "time_s",
    "outcome_m",
    "mean_x1_m",
    "mean_x2_m",
    "var_x1_m2",
    "var_x2_m2",
];

pub const BUDGET_HEADER: [&str; 10] = [
    "T_K", "omega1", "tau1", "omega2", "tau2", "dt_s", "eta1", "eta2", "eta_a", "x_zp_m",
];

/// 17 significant digits, used for record files.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Shortest exponent form that round-trips.
pub fn fmt_short(x: f64) -> String {
    format!("{x:e}")
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Records(format!("{other:?}")),
    }
}

/// Writes the post-measurement state of every step, trajectories in order.
/// Trajectories must have been simulated with records kept.
pub fn write_records<W: Write>(out: W, trajectories: &[Trajectory]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER).map_err(csv_error)?;
    for t in trajectories {
        if t.rows.len() != t.v22_trace.len() {
            return Err(Error::Argument(format!(
                "trajectory {} was simulated without records",
                t.index
            )));
        }
        for r in &t.rows {
            w.write_record([
                t.index.to_string(),
                r.step.to_string(),
                fmt_f64(r.time),
                fmt_f64(r.outcome),
                fmt_f64(r.mean1),
                fmt_f64(r.mean2),
                fmt_f64(r.v11),
                fmt_f64(r.v22),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a record file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordRow {
    pub traj_id: u64,
    pub step: usize,
    pub time: f64,
    pub outcome: f64,
    pub mean1: f64,
    pub mean2: f64,
    pub v11: f64,
    pub v22: f64,
}

/// A parsed record file: `n_traj` trajectories of `n_meas` steps each.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordTable {
    pub n_traj: usize,
    pub n_meas: usize,
    pub rows: Vec<RecordRow>,
}

impl RecordTable {
    fn trajectory(&self, i: usize) -> &[RecordRow] {
        &self.rows[i * self.n_meas..(i + 1) * self.n_meas]
    }

    pub fn finals_x1(&self) -> Vec<f64> {
        (0..self.n_traj).map(|i| self.trajectory(i)[self.n_meas - 1].mean1).collect()
    }

    pub fn finals_x2(&self) -> Vec<f64> {
        (0..self.n_traj).map(|i| self.trajectory(i)[self.n_meas - 1].mean2).collect()
    }

    pub fn v22_mean(&self) -> Vec<f64> {
        let traces: Vec<Vec<f64>> = (0..self.n_traj)
            .map(|i| self.trajectory(i).iter().map(|r| r.v22).collect())
            .collect();
        mean_trace(traces.iter().map(Vec::as_slice))
    }
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, col: usize, line: u64) -> Result<T> {
    let raw = record.get(col).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Records(format!("line {line}: bad `{}` value `{raw}`", RECORD_HEADER[col])))
}

/// Reads a record file. Trajectories must be numbered from 0 and each must
/// list the same number of steps, numbered from 0, in order.
pub fn read_records<R: Read>(input: R) -> Result<RecordTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(RECORD_HEADER) {
        return Err(Error::Records(format!(
            "header must be `{}`",
            RECORD_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = i as u64 + 2;
        let row = RecordRow {
            traj_id: parse_field(&record, 0, line)?,
            step: parse_field(&record, 1, line)?,
            time: parse_field(&record, 2, line)?,
            outcome: parse_field(&record, 3, line)?,
            mean1: parse_field(&record, 4, line)?,
            mean2: parse_field(&record, 5, line)?,
            v11: parse_field(&record, 6, line)?,
            v22: parse_field(&record, 7, line)?,
        };
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Records("no records".into()));
    }
    let n_meas = rows.iter().take_while(|r| r.traj_id == 0).count();
    if n_meas == 0 || rows.len() % n_meas != 0 {
        return Err(Error::Records("trajectories have unequal lengths or do not start at 0".into()));
    }
    for (k, r) in rows.iter().enumerate() {
        let (traj, step) = ((k / n_meas) as u64, k % n_meas);
        if r.traj_id != traj || r.step != step {
            return Err(Error::Records(format!(
                "line {}: expected traj_id {traj} step {step}, got {} {}",
                k + 2,
                r.traj_id,
                r.step
            )));
        }
    }
    Ok(RecordTable {
        n_traj: rows.len() / n_meas,
        n_meas,
        rows,
    })
}

/// Recomputes the run statistics from a record file. `n_traj` and `n_meas`
/// are taken from the file; the rest of `config` supplies the physics.
pub fn analyze_records(table: &RecordTable, config: &RunConfig, n_mc: usize) -> Result<RunSummary> {
    let config = RunConfig {
        n_traj: table.n_traj,
        n_meas: table.n_meas,
        ..config.clone()
    };
    summarize(&config, &table.finals_x1(), &table.v22_mean(), n_mc)
}

pub fn write_summary<W: Write>(mut out: W, summary: &RunSummary) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, summary).map_err(|e| Error::Numerical(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<RunSummary> {
    serde_json::from_reader(input).map_err(|e| Error::Config(format!("bad summary: {e}")))
}

pub fn write_budget_csv<W: Write>(out: W, rows: &[(BudgetInputs, BudgetReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BUDGET_HEADER).map_err(csv_error)?;
    for (i, r) in rows {
        w.write_record(
            [
                i.temperature,
                i.omega1,
                i.tau1,
                i.omega2,
                i.tau2,
                i.dt,
                r.eta1,
                r.eta2,
                r.eta_a,
                r.x_zp,
            ]
            .map(fmt_short),
        )
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
