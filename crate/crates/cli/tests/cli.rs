use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evcascade"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn prepared() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["gen"])), 0);
    let net = run(dir.path(), &["network"]);
    assert_eq!(code(&net), 0, "{}", String::from_utf8_lossy(&net.stderr));
    dir
}

#[test]
fn full_workflow_writes_expected_files() {
    let dir = prepared();
    let p = dir.path();
    for args in [
        &["simulate", "--instances", "3", "--gnuplot"][..],
        &["sweep-alpha", "--instances", "3", "--alphas", "0.1,0.5"],
        &["sweep-eta", "--instances", "3", "--etas", "0.2,0.6"],
        &["incentive", "--instances", "3", "--rho", "0.5,1.0", "--strategy", "both"],
        &["verify", "--graphs", "20", "--max-n", "8"],
    ] {
        let o = run(p, args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "records.csv",
        "planted.csv",
        "profiles.csv",
        "network.json",
        "prune_report.txt",
        "trajectory.csv",
        "trajectory_summary.csv",
        "trajectory.gp",
        "simulate_manifest.json",
        "alpha_finals.csv",
        "alpha_summary.csv",
        "alpha_manifest.json",
        "eta_finals.csv",
        "eta_summary.csv",
        "incentive_random_summary.csv",
        "incentive_degree_finals.csv",
        "incentive_manifest.json",
        "verify.csv",
    ] {
        assert!(p.join(f).is_file(), "missing {f}");
    }
    let summary = fs::read_to_string(p.join("alpha_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.starts_with("param,mean,std\n"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = prepared();
    let p = dir.path();
    let first = fs::read(p.join("network.json")).unwrap();
    assert_eq!(code(&run(p, &["simulate", "--instances", "4"])), 0);
    let traj = fs::read(p.join("trajectory.csv")).unwrap();
    let manifest = fs::read(p.join("simulate_manifest.json")).unwrap();
    assert_eq!(code(&run(p, &["network"])), 0);
    assert_eq!(code(&run(p, &["simulate", "--instances", "4"])), 0);
    assert_eq!(fs::read(p.join("network.json")).unwrap(), first);
    assert_eq!(fs::read(p.join("trajectory.csv")).unwrap(), traj);
    assert_eq!(fs::read(p.join("simulate_manifest.json")).unwrap(), manifest);
}

#[test]
fn jobs_do_not_change_results() {
    let dir = prepared();
    let p = dir.path();
    assert_eq!(code(&run(p, &["sweep-alpha", "--instances", "6", "--jobs", "1"])), 0);
    let one = fs::read(p.join("alpha_finals.csv")).unwrap();
    assert_eq!(code(&run(p, &["sweep-alpha", "--instances", "6", "--jobs", "3"])), 0);
    assert_eq!(fs::read(p.join("alpha_finals.csv")).unwrap(), one);
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["gen", "--suitable-fraction", "1.5"])), 2);
    assert_eq!(code(&run(p, &["simulate"])), 2, "missing network file");
    assert_eq!(code(&run(p, &["verify", "--max-n", "40"])), 2);
    let cfg = p.join("bad.conf");
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(code(&run(p, &["gen", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn config_file_values_apply() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cfg = p.join("run.conf");
    fs::write(&cfg, "# small fleet\nvehicles = 12\ndays = 5\n").unwrap();
    assert_eq!(code(&run(p, &["gen", "--config", cfg.to_str().unwrap()])), 0);
    let planted = fs::read_to_string(p.join("planted.csv")).unwrap();
    assert_eq!(planted.lines().count(), 13);
}

#[test]
fn degenerate_fleet_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run(p, &["gen", "--vehicles", "1"])), 0);
    let o = run(p, &["network"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_no_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--graphs", "30", "--max-n", "10"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31);
    assert!(csv.lines().skip(1).all(|l| l.ends_with("true,true")));
}
