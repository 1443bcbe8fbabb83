//! Run configuration, ensemble orchestration and file formats.

pub mod config;
pub mod ensemble;
pub mod io;
pub mod sweep;

pub use config::{RunConfig, CONFIG_KEYS};
pub use ensemble::{
    mean_trace, run_ensemble, simulate_trajectory, summarize, EnsembleOptions, EnsembleRun, RunSummary, StepRow,
    Trajectory, TrajectorySetup,
};
pub use io::{
    analyze_records, read_records, read_summary, write_budget_csv, write_records, write_summary, RecordRow,
    RecordTable, BUDGET_HEADER, RECORD_HEADER,
};
pub use sweep::{run_sweep, sweep_configs, write_sweep_csv, SweepAxis, SweepPoint};
