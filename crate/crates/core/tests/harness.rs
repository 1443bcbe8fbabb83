use std::fs::File;
use std::io::{BufReader, BufWriter};

use qndsim_core::harness::*;
use qndsim_core::measurement::{CollapsePolicy, MeterKind};

fn config() -> RunConfig {
    RunConfig {
        n_traj: 300,
        n_meas: 20,
        seed: 42,
        ..RunConfig::default()
    }
}

fn files(config: &RunConfig, workers: usize) -> (Vec<u8>, Vec<u8>) {
    let opts = EnsembleOptions {
        workers: Some(workers),
        keep_records: true,
        ..EnsembleOptions::default()
    };
    let run = run_ensemble(config, &opts).unwrap();
    let (mut records, mut summary) = (Vec::new(), Vec::new());
    write_records(&mut records, &run.trajectories).unwrap();
    write_summary(&mut summary, &run.summary).unwrap();
    (records, summary)
}

#[test]
fn output_is_independent_of_worker_count() {
    let c = config();
    let one = files(&c, 1);
    assert_eq!(one, files(&c, 1));
    assert_eq!(one, files(&c, 4));
}

#[test]
fn seed_changes_the_output() {
    let c = config();
    let other = RunConfig { seed: 43, ..c.clone() };
    assert_ne!(files(&c, 1).0, files(&other, 1).0);
}

#[test]
fn analyze_reproduces_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig {
        meter_kind: MeterKind::Position,
        ..config()
    };
    let run = run_ensemble(
        &c,
        &EnsembleOptions {
            keep_records: true,
            ..EnsembleOptions::default()
        },
    )
    .unwrap();
    let path = dir.path().join("records.csv");
    write_records(BufWriter::new(File::create(&path).unwrap()), &run.trajectories).unwrap();
    let table = read_records(BufReader::new(File::open(&path).unwrap())).unwrap();
    let again = analyze_records(&table, &c, EnsembleOptions::default().n_mc).unwrap();
    assert_eq!(again, run.summary);
}

#[test]
fn trajectories_partition_by_index() {
    let c = config();
    let whole = run_ensemble(&c, &EnsembleOptions::default()).unwrap();
    let first = run_ensemble(
        &RunConfig {
            n_traj: 120,
            ..c.clone()
        },
        &EnsembleOptions::default(),
    )
    .unwrap();
    let setup = TrajectorySetup::new(&c).unwrap();
    let rest: Vec<Trajectory> = (120..300)
        .map(|i| simulate_trajectory(&setup, i, false).unwrap())
        .collect();
    let merged: Vec<&Trajectory> = first.trajectories.iter().chain(&rest).collect();
    assert_eq!(merged.len(), whole.trajectories.len());
    for (a, b) in merged.iter().zip(&whole.trajectories) {
        assert_eq!(*a, b);
    }
}

#[test]
fn summary_echo_reproduces_the_run() {
    let c = RunConfig {
        collapse_policy: CollapsePolicy::NoConditioning,
        sigma_m_m: 7.3e-21,
        ..config()
    };
    let (records, summary) = files(&c, 2);
    let echoed = RunConfig::from_summary_json(std::str::from_utf8(&summary).unwrap()).unwrap();
    assert_eq!(echoed, c);
    assert_eq!(files(&echoed, 1), (records.clone(), summary.clone()));
    let reparsed = RunConfig::parse(&echoed.to_config_text()).unwrap();
    assert_eq!(files(&reparsed, 1), (records, summary));
}

#[test]
fn single_trajectory_single_measurement() {
    let c = RunConfig {
        n_traj: 1,
        n_meas: 1,
        ..RunConfig::default()
    };
    let (records, summary) = files(&c, 1);
    let text = String::from_utf8(records).unwrap();
    assert_eq!(text.lines().count(), 2);
    let json = String::from_utf8(summary).unwrap();
    assert!(json.contains("\"t1_hat_K\": null"));
    assert!(json.contains("\"eta1\": 0.654"));
}
