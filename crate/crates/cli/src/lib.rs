//! `qndsim` command line.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 numerical failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qndsim_core::harness::{
    analyze_records, read_records, read_summary, run_ensemble, run_sweep, write_budget_csv, write_records,
    write_summary, write_sweep_csv, EnsembleOptions, RunConfig, RunSummary, SweepAxis,
};
use qndsim_core::noise_budget::{budget_sweep, BudgetGrid, BudgetInputs};
use qndsim_core::observables::{is_qnd_sequence, BathModel, Observable, OscillatorParams, DEFAULT_QND_TOL};
use qndsim_core::stats::DEFAULT_CALIBRATION_REPLICAS;
use qndsim_core::{Error, Result};

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Parser, Debug)]
#[command(name = "qndsim", version, about = "Stroboscopic QND monitoring of a thermally coupled oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Thermal drift quanta per measurement interval.
    Budget(BudgetArgs),
    /// Check whether an observable commutes with itself at the given times.
    QndCheck(QndArgs),
    /// Run a trajectory ensemble.
    Simulate(SimulateArgs),
    /// Run ensembles over a grid of config values.
    Sweep(SweepArgs),
    /// Recompute the statistics of an existing record file.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Config file supplying defaults (temperature_K, omega1_rad_s, ...).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bath temperature, K.
    #[arg(long = "T", value_delimiter = ',')]
    temperature: Vec<f64>,
    /// Mechanical angular frequency, rad/s.
    #[arg(long, value_delimiter = ',')]
    omega1: Vec<f64>,
    /// Mechanical relaxation time, s.
    #[arg(long, value_delimiter = ',')]
    tau1: Vec<f64>,
    /// Electrical angular frequency, rad/s.
    #[arg(long, value_delimiter = ',')]
    omega2: Vec<f64>,
    /// Electrical relaxation time, s.
    #[arg(long, value_delimiter = ',')]
    tau2: Vec<f64>,
    /// Measurement interval, s.
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    /// Amplifier noise quanta.
    #[arg(long = "eta-a", value_delimiter = ',')]
    eta_a: Vec<f64>,
    /// Oscillator mass, kg.
    #[arg(long, value_delimiter = ',')]
    mass: Vec<f64>,
    /// Write the budget CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QndArgs {
    /// x, p, x1, x2 or linear:CX,CP
    #[arg(long)]
    observable: String,
    /// Comma-separated measurement times, s.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    times: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    mass: f64,
    #[arg(long, default_value_t = 1e4)]
    omega1: f64,
    /// Relative tolerance on the commutator.
    #[arg(long, default_value_t = DEFAULT_QND_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Run config file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Calibration replicas for the goodness-of-fit p-value.
    #[arg(long = "n-mc", default_value_t = DEFAULT_CALIBRATION_REPLICAS)]
    n_mc: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Output directory for records.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write wall_time_s into summary.json.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Swept key and values, `key=v1,v2,...`. Repeatable.
    #[arg(long = "axis", value_name = "KEY=V1,V2", required = true)]
    axes: Vec<String>,
    /// Write the sweep CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Record CSV written by `simulate`.
    #[arg(long)]
    records: PathBuf,
    /// Summary whose config echo supplies the physics. Defaults to
    /// summary.json next to the records.
    #[arg(long, conflicts_with = "config")]
    summary: Option<PathBuf>,
    /// Config file supplying the physics instead of a summary.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the calibration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Significance threshold for the goodness-of-fit verdict.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long = "n-mc", default_value_t = DEFAULT_CALIBRATION_REPLICAS)]
    n_mc: usize,
    /// Write the recomputed summary JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Budget(a) => cmd_budget(a, out),
        Command::QndCheck(a) => cmd_qnd_check(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Four significant digits, switching to exponent form outside [1e-3, 1e5).
pub fn sig4(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() {
        format!("{x}")
    } else if (1e-3..1e5).contains(&a) {
        let decimals = (3 - a.log10().floor() as i32).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.3e}")
    }
}

fn or_default(values: Vec<f64>, default: f64) -> Vec<f64> {
    if values.is_empty() {
        vec![default]
    } else {
        values
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn cmd_budget(a: BudgetArgs, out: &mut dyn Write) -> Result<()> {
    let base = match &a.config {
        Some(p) => RunConfig::from_file(p)?.budget_inputs(),
        None => BudgetInputs::default(),
    };
    let grid = BudgetGrid {
        temperature: or_default(a.temperature, base.temperature),
        omega1: or_default(a.omega1, base.omega1),
        tau1: or_default(a.tau1, base.tau1),
        omega2: or_default(a.omega2, base.omega2),
        tau2: or_default(a.tau2, base.tau2),
        dt: or_default(a.dt, base.dt),
        amplifier_quanta: or_default(a.eta_a, base.amplifier_quanta),
        mass: or_default(a.mass, base.mass),
    };
    let rows = budget_sweep(&grid)?;
    if let Some(path) = &a.out {
        write_budget_csv(BufWriter::new(File::create(path)?), &rows)?;
    }
    if let [(_, r)] = rows.as_slice() {
        writeln!(out, "eta1={}", sig4(r.eta1))?;
        writeln!(out, "eta2={}", sig4(r.eta2))?;
        writeln!(out, "eta_a={}", sig4(r.eta_a))?;
        writeln!(out, "delta_e_br_J={}", sig4(r.delta_e_br))?;
        writeln!(out, "x_zp_m={}", sig4(r.x_zp))?;
    } else if a.out.is_none() {
        write_budget_csv(&mut *out, &rows)?;
    }
    Ok(())
}

fn cmd_qnd_check(a: QndArgs, out: &mut dyn Write) -> Result<()> {
    let observable: Observable = a.observable.parse()?;
    let defaults = RunConfig::default();
    let params = OscillatorParams::new(
        a.mass,
        a.omega1,
        defaults.tau1_s,
        defaults.temperature_k,
        BathModel::Classical,
    )?;
    let verdict = is_qnd_sequence(&observable, &a.times, &params, a.tol)?;
    writeln!(
        out,
        "QND: {}, max violation {:.1e}",
        if verdict.is_qnd { "yes" } else { "no" },
        verdict.relative_violation()
    )?;
    Ok(())
}

fn run_config(a: &RunArgs) -> Result<RunConfig> {
    let mut config = load_config(a.config.as_deref())?;
    for kv in &a.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("--set expects key=value, got `{kv}`")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn opt(x: Option<f64>) -> String {
    x.map(sig4).unwrap_or_else(|| "n/a".into())
}

fn print_stats(out: &mut dyn Write, s: &RunSummary) -> Result<()> {
    writeln!(out, "trajectories={} measurements={}", s.config.n_traj, s.config.n_meas)?;
    writeln!(out, "t1_hat_K={} stderr_K={}", opt(s.t1_hat_k), opt(s.t1_stderr_k))?;
    writeln!(out, "gof_statistic={} gof_p_value={}", opt(s.gof_statistic), opt(s.gof_p_value))?;
    writeln!(
        out,
        "v22_slope_m2={} rel_error={}",
        opt(s.v22_slope_m2),
        opt(s.v22_slope_rel_error)
    )?;
    writeln!(out, "eta1={} eta2={}", sig4(s.eta1), sig4(s.eta2))?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let config = run_config(&a.run)?;
    let opts = EnsembleOptions {
        workers: a.run.workers,
        keep_records: a.out.is_some(),
        n_mc: a.run.n_mc,
        timing: true,
    };
    let run = run_ensemble(&config, &opts)?;
    let wall = run.summary.wall_time_s;
    let mut summary = run.summary;
    if !a.timing {
        summary.wall_time_s = None;
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        summary.records_file = Some(RECORDS_FILE.to_string());
        write_records(BufWriter::new(File::create(dir.join(RECORDS_FILE))?), &run.trajectories)?;
        write_summary(BufWriter::new(File::create(dir.join(SUMMARY_FILE))?), &summary)?;
    }
    print_stats(out, &summary)?;
    if let Some(w) = wall {
        writeln!(out, "wall_time_s={w:.3}")?;
    }
    if let Some(dir) = &a.out {
        writeln!(out, "wrote {}", dir.join(SUMMARY_FILE).display())?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let config = run_config(&a.run)?;
    let axes = a
        .axes
        .iter()
        .map(|s| s.parse::<SweepAxis>())
        .collect::<Result<Vec<_>>>()?;
    let opts = EnsembleOptions {
        workers: a.run.workers,
        n_mc: a.run.n_mc,
        ..EnsembleOptions::default()
    };
    let points = run_sweep(&config, &axes, &opts)?;
    match &a.out {
        Some(path) => write_sweep_csv(BufWriter::new(File::create(path)?), &axes, &points)?,
        None => write_sweep_csv(&mut *out, &axes, &points)?,
    }
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::Argument(format!("--alpha must be in (0, 1), got {}", a.alpha)));
    }
    let mut config = match (&a.config, &a.summary) {
        (Some(c), _) => RunConfig::from_file(c)?,
        (None, Some(s)) => read_summary(BufReader::new(File::open(s)?))?.config,
        (None, None) => {
            let sibling = a.records.with_file_name(SUMMARY_FILE);
            let file = File::open(&sibling).map_err(|_| {
                Error::Argument(format!(
                    "no --summary or --config given and {} does not exist",
                    sibling.display()
                ))
            })?;
            read_summary(BufReader::new(file))?.config
        }
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let file = File::open(&a.records)
        .map_err(|e| Error::Argument(format!("cannot open {}: {e}", a.records.display())))?;
    let table = read_records(BufReader::new(file))?;
    let mut summary = analyze_records(&table, &config, a.n_mc)?;
    summary.records_file = Some(a.records.display().to_string());
    print_stats(out, &summary)?;
    match summary.gof_p_value {
        Some(p) if p < a.alpha => writeln!(out, "verdict: Boltzmann law rejected at alpha={}", a.alpha)?,
        Some(_) => writeln!(out, "verdict: consistent with Boltzmann law at alpha={}", a.alpha)?,
        None => writeln!(out, "verdict: too few trajectories for a goodness-of-fit test")?,
    }
    if let Some(path) = &a.out {
        write_summary(BufWriter::new(File::create(path)?), &summary)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_digits() {
        assert_eq!(sig4(0.654_601_7), "0.6546");
        assert_eq!(sig4(13.092), "13.09");
        assert_eq!(sig4(1.0), "1.000");
        assert_eq!(sig4(3.2477e-18), "3.248e-18");
        assert_eq!(sig4(0.0), "0");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
