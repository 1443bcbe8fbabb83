use std::fs;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("qndsim").chain(args.iter().copied());
    let code = qndsim::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn budget_prints_eta1() {
    let (code, out, _) = run(&["budget", "--T", "0.05", "--omega1", "1e4", "--dt", "1e-2", "--tau1", "1e4"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "eta1=0.6546"), "{out}");
}

#[test]
fn budget_grid_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("budget.csv");
    let (code, out, _) = run(&[
        "budget",
        "--T",
        "0.05,0.1",
        "--tau1",
        "1e3,1e4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T_K,omega1,tau1,omega2,tau2,dt_s,eta1,eta2,eta_a,x_zp_m");
    assert_eq!(lines.len(), 5);
    let (code, out, _) = run(&["budget", "--dt", "1e-3,1e-2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn qnd_check_verdicts() {
    let (code, out, _) = run(&["qnd-check", "--observable", "x1", "--times", "0,0.3,0.7"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "QND: yes, max violation 0.0e0");
    let (_, out, _) = run(&["qnd-check", "--observable", "x", "--times", "0,1.5707963267948966e-4"]);
    assert_eq!(out.trim(), "QND: no, max violation 1.0e0");
    let (code, _, err) = run(&["qnd-check", "--observable", "y", "--times", "0,1"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown observable"));
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = run(&["simulate", "--config", "missing.cfg"]);
    assert_eq!(code, 1);
    assert!(err.contains("missing.cfg"));
    let (code, _, err) = run(&["budget", "--frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate"));
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nn_traj = 150\nn_meas = 8\nseed = 9\n").unwrap();
    let out_dir = dir.path().join("out");
    let (code, out, err) = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("t1_hat_K="));
    let records = fs::read_to_string(out_dir.join("records.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 150 * 8);
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"records_file\": \"records.csv\""));
    assert!(!summary.contains("wall_time_s"));

    let again = dir.path().join("again.json");
    let (code, out, err) = run(&[
        "analyze",
        "--records",
        out_dir.join("records.csv").to_str().unwrap(),
        "--alpha",
        "0.05",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("verdict:"));
    let strip = |s: &str| s.lines().filter(|l| !l.contains("records_file")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&summary), strip(&fs::read_to_string(again).unwrap()));
}

#[test]
fn simulate_seed_flag_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (d, seed) in [(&a, "3"), (&b, "3")] {
        let (code, _, err) = run(&[
            "simulate",
            "--set",
            "n_traj=20",
            "--set",
            "n_meas=5",
            "--seed",
            seed,
            "--workers",
            "2",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(
        fs::read(a.join("records.csv")).unwrap(),
        fs::read(b.join("records.csv")).unwrap()
    );
    let (code, _, _) = run(&[
        "simulate",
        "--set",
        "n_traj=5",
        "--set",
        "n_meas=5",
        "--timing",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(fs::read_to_string(a.join("summary.json")).unwrap().contains("wall_time_s"));
}

#[test]
fn analyze_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("records.csv");
    fs::write(&rec, "traj_id,step\n0,0\n").unwrap();
    let (code, _, err) = run(&["analyze", "--records", rec.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("summary.json"));
    let (code, _, err) = run(&["analyze", "--records", rec.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("alpha"));
}

#[test]
fn sweep_rows_per_point() {
    let (code, out, err) = run(&[
        "sweep",
        "--set",
        "n_traj=30",
        "--set",
        "n_meas=5",
        "--axis",
        "dt_s=0.01,0.1",
        "--axis",
        "bath_model=classical,quantum",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("dt_s,bath_model,n_traj"));
    assert!(lines[4].starts_with("0.1,quantum,30,5,"));
}

#[test]
fn numerical_failure_exits_two() {
    // A meter this sharp makes the back-action variance overflow.
    let (code, _, err) = run(&["simulate", "--set", "sigma_m_m=1e-300", "--set", "n_traj=1"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qndsim");
    let ok = Command::new(bin).args(["budget"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("eta1=0.6546"));
    let bad = Command::new(bin).args(["simulate", "--config", "missing.cfg"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn shipped_configs_parse() {
    use qndsim_core::harness::RunConfig;
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let default = RunConfig::from_file(&dir.join("default.cfg")).unwrap();
    assert_eq!(default, RunConfig::default());
    let position = RunConfig::from_file(&dir.join("position_meter.cfg")).unwrap();
    assert_eq!(position.meter_kind, qndsim_core::measurement::MeterKind::Position);
}
