//! End-to-end runs of the `maint-sim` binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maint-sim"));
    c.env_remove("MAINT_SIM_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn theory_grid_has_twenty_rows() {
    let out = run(&[
        "theory",
        "--mode",
        "error_avg",
        "--sigma",
        "5",
        "--lambda",
        "0.1",
        "--T",
        "10:200:10",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 20);
    let row100: Vec<f64> = rows[9].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row100[0], 100.0);
    assert!((row100[3] - 10133.2667467697).abs() < 1e-6);
    assert!(String::from_utf8(out.stderr).unwrap().contains("20 rows"));
}

#[test]
fn theory_writes_to_file_and_asymptote_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = run(&[
        "theory",
        "--mode",
        "asymptote",
        "--sigma",
        "10",
        "--C",
        "50",
        "--T",
        "20:200:20",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("10 rows"));
    let text = std::fs::read_to_string(path).unwrap();
    for row in data_rows(&text) {
        let limit: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((limit - 3333.333333333333).abs() < 1e-9);
    }
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &[
            "theory",
            "--mode",
            "error_avg",
            "--sigma",
            "5",
            "--lambda",
            "0.1",
            "--T",
            "200:10:10",
        ][..],
        &[
            "theory",
            "--mode",
            "error_avg",
            "--sigma",
            "5",
            "--lambda",
            "0.1",
            "--T",
            "0:10:0",
        ][..],
        &["simulate", "fig7"][..],
        &["simulate"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = run(&[
        "simulate",
        "fig5",
        "--replications",
        "2",
        "--out-dir",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out-dir", dir.to_str().unwrap()]);
    run(&args)
}

#[test]
fn seeded_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        assert!(simulate(d, &["fig5", "--seed", "42"]).status.success());
    }
    let fa = std::fs::read(a.path().join("fig5.csv")).unwrap();
    assert_eq!(fa, std::fs::read(b.path().join("fig5.csv")).unwrap());

    let c = tempfile::tempdir().unwrap();
    let manifest = a.path().join("fig5.manifest.toml");
    let out = run(&[
        "simulate",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out-dir",
        c.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fa, std::fs::read(c.path().join("fig5.csv")).unwrap());

    let text = String::from_utf8(fa).unwrap();
    assert!(text.contains("# model.seed=42"));
    assert!(text.contains("# query_sampling=uniform, 20 per replication"));
}

#[test]
fn config_file_and_flags_layer_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "t_values = [10.0, 30.0]\nreplications = 5\n[model]\nsigma = 2.0\n",
    )
    .unwrap();
    let out = simulate(
        dir.path(),
        &[
            "fig5",
            "--config",
            cfg.to_str().unwrap(),
            "--replications",
            "3",
            "--set",
            "model.span=50.0",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    assert!(text.contains("# replications=3"));
    assert!(text.contains("# model.sigma=2.0"));
    assert!(text.contains("# model.span=50.0"));
    assert_eq!(data_rows(&text).len(), 2);

    std::fs::write(&cfg, "replications = \"many\"").unwrap();
    assert_eq!(
        simulate(dir.path(), &["fig5", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn fig4_output_has_both_protocol_series() {
    let dir = tempfile::tempdir().unwrap();
    assert!(simulate(dir.path(), &["fig4", "--replications", "200"])
        .status
        .success());
    let text = std::fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let rows = data_rows(&text);
    assert!(rows.iter().any(|r| r.starts_with("maint,")));
    assert!(rows.iter().any(|r| r.starts_with("madrd,")));
    assert!(dir.path().join("fig4.manifest.toml").exists());
}

#[test]
fn moments_default_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), &["moments"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(data_rows(&text).iter().all(|r| !r.ends_with(",fail")));
}

#[test]
fn moments_rejects_degenerate_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), &["moments", "--set", "moments.samples=1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("MAINT_SIM_OUT_DIR", dir.path())
        .args(["simulate", "fig6", "--replications", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("fig6.csv").exists());
}
