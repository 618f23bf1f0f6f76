use std::fs;
use std::path::Path;
use std::process::Command as Process;

use saltflow_cli::{
    cmd_converge, cmd_simulate, cmd_stability, cmd_verify, parse_config, parse_config_str, ExperimentSpec,
};

fn spec(text: &str, out: &Path) -> ExperimentSpec {
    let mut s = parse_config_str(text).unwrap();
    s.out = out.to_path_buf();
    s
}

const SQG_SMALL: &str = r#"
[experiment]
command = "simulate"
seed = 11
ensemble = 4

[model]
name = "sqg"

[grid]
n = 16

[time]
dt = 1e-3
t_end = 0.02
scheme = "em"
sample_every = 5
"#;

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn zero_horizon_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let text = SQG_SMALL
        .replace("t_end = 0.02", "t_end = 0.0")
        .replace("ensemble = 4", "ensemble = 1");
    let out = cmd_simulate(&spec(&text, dir.path()), 1).unwrap();
    assert_eq!(out.trajectories.len(), 1);
    let traj = read(&out.trajectories[0]);
    let rows: Vec<&str> = traj.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "{traj}");
    assert!(rows[1].starts_with("0,"));
    for (_, rec) in &out.records {
        assert_eq!(rec.tau, 0.0);
    }
}

#[test]
fn repeated_runs_are_byte_identical_and_worker_count_is_invisible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = SQG_SMALL.replace("ensemble = 4", "ensemble = 8");
    let oa = cmd_simulate(&spec(&text, a.path()), 1).unwrap();
    let ob = cmd_simulate(&spec(&text, b.path()), 8).unwrap();
    assert_eq!(oa.trajectories.len(), 8);
    assert_eq!(read(&oa.stats), read(&ob.stats));
    for (x, y) in oa.trajectories.iter().zip(&ob.trajectories) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let without_out = |p: &Path| {
        read(&p.join("manifest.toml"))
            .lines()
            .filter(|l| !l.starts_with("out ="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(without_out(a.path()), without_out(b.path()));
}

#[test]
fn manifest_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = spec(SQG_SMALL, a.path());
    cmd_simulate(&first, 1).unwrap();
    let mut again = parse_config(&a.path().join("manifest.toml")).unwrap();
    assert_eq!(again.sim, first.sim);
    again.out = b.path().to_path_buf();
    cmd_simulate(&again, 2).unwrap();
    for name in ["ensemble_stats.csv", "traj_11.csv", "traj_14.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn ensemble_stats_average_members() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_simulate(&spec(SQG_SMALL, dir.path()), 1).unwrap();
    let stats = read(&out.stats);
    assert!(stats.starts_with("# members=4\n"));
    let last = stats.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    let hs: Vec<f64> = out.records.iter().map(|(_, r)| r.last().hs_norm).collect();
    let mean = hs.iter().sum::<f64>() / 4.0;
    assert_eq!(cols[1], 4.0);
    assert!((cols[2] - mean).abs() <= 1e-12 * mean);
    assert!(cols[3] > 0.0);
}

#[test]
fn verify_single_id_and_unknown_id() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[experiment]\ncommand = \"verify\"\n[verify]\nestimates = [\"cancellation\"]\n";
    let out = cmd_verify(&spec(text, dir.path())).unwrap();
    assert_eq!(out.reports.len(), 1);
    assert!(out.all_pass());
    assert_eq!(out.table.lines().count(), 2, "{}", out.table);
    assert!(dir.path().join("verify/cancellation.csv").exists());
    assert_eq!(read(&dir.path().join("verify_summary.txt")), out.table);

    let err = parse_config_str("[verify]\nestimates = [\"dong\", \"nope\"]\n").unwrap_err();
    assert_eq!(err.line, Some(2));
    assert!(err.message.contains("cancellation"), "{err}");
}

#[test]
fn eps_ladder_on_bandlimited_data_is_flat() {
    // With N = 16 the band stops at |k| = 5, where J_ε is the identity for
    // every ε on the ladder, so all rungs give the same trajectory.
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
name = "ccf"
[grid]
n = 16
[time]
dt = 1e-3
t_end = 0.05
[converge]
eps_ladder = [0.15, 0.1, 0.05]
"#;
    let r = cmd_converge(&spec(text, dir.path()), 1).unwrap();
    assert_eq!(r.eps_rows.len(), 2);
    for row in &r.eps_rows {
        assert_eq!(row.distance, 0.0);
    }
    assert!(read(&dir.path().join("converge_eps.csv")).contains("eps,next_eps,distance"));
}

#[test]
fn eps_ladder_distances_shrink_for_rough_data() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[experiment]
ensemble = 2
[model]
name = "ccf"
[grid]
n = 64
[time]
dt = 1e-3
t_end = 0.05
[init]
kind = "random"
amplitude = 0.5
modes = 16
[converge]
eps_ladder = [0.2, 0.1, 0.05, 0.025]
"#;
    let r = cmd_converge(&spec(text, dir.path()), 2).unwrap();
    let d: Vec<f64> = r.eps_rows.iter().map(|x| x.distance).collect();
    assert!(d.iter().all(|v| *v > 0.0), "{d:?}");
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert_eq!(r.early_stops, 0);
}

#[test]
fn linear_dt_ladder_gives_half_order() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[experiment]
ensemble = 400
seed = 5
[model]
name = "linear"
rate = 1.0
[grid]
n = 8
[time]
dt = 1e-3
t_end = 1.0
[converge]
dt_ladder = [0.03125, 0.015625, 0.0078125, 0.00390625]
"#;
    let r = cmd_converge(&spec(text, dir.path()), 4).unwrap();
    let order = r.em_strong_order.unwrap();
    assert!((order - 0.5).abs() < 0.15, "{order}");
    assert!(r.dt_rows.iter().all(|row| row.em_exact.is_some()));
    let csv = read(&dir.path().join("converge_dt.csv"));
    assert!(csv.contains("# em_strong_order=Some("), "{csv}");
}

#[test]
fn short_ladders_are_rejected() {
    let err = parse_config_str("[model]\nname = \"ccf\"\n[grid]\nn = 32\n[time]\ndt = 0.01\nt_end = 0.1\n[converge]\neps_ladder = [0.1, 0.05]\n")
        .unwrap_err();
    assert_eq!(err.line, Some(9), "{err}");
    let mut spec =
        parse_config_str("[model]\nname = \"ccf\"\n[grid]\nn = 32\n[time]\ndt = 0.01\nt_end = 0.1\n").unwrap();
    spec.command = saltflow_cli::Command::Converge;
    assert!(cmd_converge(&spec, 1).is_err());
}

#[test]
fn stability_zero_perturbation_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[experiment]
command = "stability"
[model]
name = "ccf"
[grid]
n = 64
[time]
dt = 1e-3
t_end = 0.05
[stability]
delta = 1e-6
mode = [3, 0]
shrink = 10
"#;
    let out = cmd_stability(&spec(text, dir.path())).unwrap();
    assert_eq!(out.runs.len(), 3);
    assert_eq!(out.runs[2].1.sup_distance, 0.0);
    assert!(out.agreement.unwrap() < 0.2);
    let trace = read(&dir.path().join("stability_trace.csv"));
    assert_eq!(trace.lines().count(), out.runs[0].1.times.len() + 1);
}

#[test]
fn binary_runs_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, SQG_SMALL).unwrap();
    let out = dir.path().join("out");
    let status = Process::new(env!("CARGO_BIN_EXE_saltflow"))
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
            "--workers",
            "2",
        ])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.join("traj_3.csv").exists() && out.join("traj_6.csv").exists());
    assert!(read(&out.join("manifest.toml")).contains("seed = 3"));

    fs::write(
        &cfg,
        "[model]\nname = \"sqg\"\n[grid]\nn = 30\n[time]\ndt = 0.01\nt_end = 0.1\n",
    )
    .unwrap();
    let bad = Process::new(env!("CARGO_BIN_EXE_saltflow"))
        .args(["simulate", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&bad.stderr).contains("line 4"),
        "{}",
        String::from_utf8_lossy(&bad.stderr)
    );
}

#[test]
fn verify_exit_status_follows_pass_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("v.toml");
    let run = |threshold: &str| {
        let text =
            format!("[verify]\nestimates = [\"kato_ponce\"]\nresolutions = [32, 64, 128]\nthreshold = {threshold}\n");
        fs::write(&cfg, text).unwrap();
        Process::new(env!("CARGO_BIN_EXE_saltflow"))
            .args(["verify", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
            .output()
            .unwrap()
    };
    let ok = run("0.1");
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("kato_ponce"));
    // No measured exponent can sit below -10, so the check must fail.
    let bad = run("-10.0");
    assert_eq!(bad.status.code(), Some(1), "{}", String::from_utf8_lossy(&bad.stdout));
}
