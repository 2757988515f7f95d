use std::path::Path;
use std::process::{Command, Output};

fn rwbandit(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwbandit"))
        .args(args)
        .env("RWBANDIT_OUT", out_dir)
        .output()
        .expect("binary runs")
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = rwbandit(dir.path(), &["validate", "exp9"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("inf-norm = 0.5"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "k = 1\nrho = 0.9\nm = [1.0]\n").unwrap();
    assert_eq!(
        rwbandit(dir.path(), &["validate", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let garbled = dir.path().join("garbled.toml");
    std::fs::write(&garbled, "k = \n").unwrap();
    assert_eq!(
        rwbandit(dir.path(), &["validate", garbled.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "instance = \"fig1\"\nhorizon = 0\n").unwrap();
    let out = rwbandit(dir.path(), &["run-ucb", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let missing = rwbandit(dir.path(), &["run-exp3", "--config", "/nonexistent.toml"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn runs_write_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "instance = \"exp9\"\nhorizon = 200\nruns = 2\nlengths = \"exp-adv\"\nestimator = \"covered\"\neta = 0.01\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert!(rwbandit(dir.path(), &["run-exp3", "--config", c])
        .status
        .success());
    assert!(rwbandit(dir.path(), &["run-ucb", "--config", c])
        .status
        .success());
    let run = std::fs::read_to_string(dir.path().join("exp3_run1.csv")).unwrap();
    assert!(run.starts_with("t,played,realized,regret,estimate_error,p_0"));
    assert_eq!(run.lines().count(), 201);
    let ucb = std::fs::read_to_string(dir.path().join("ucb_run0.csv")).unwrap();
    assert!(ucb.lines().next().unwrap().contains("index_8,ztilde_0"));

    let curves = dir.path().join("ucb_curves.csv");
    let svg = dir.path().join("ucb.svg");
    let plot = rwbandit(
        dir.path(),
        &[
            "plot",
            curves.to_str().unwrap(),
            "--out",
            svg.to_str().unwrap(),
            "--title",
            "ucb",
        ],
    );
    assert!(plot.status.success());
    assert!(std::fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn lowerbound_report_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = rwbandit(
        dir.path(),
        &[
            "lowerbound-report",
            "--horizons",
            "100,10000",
            "--ks",
            "2,4",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("lowerbound.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    let knode = std::fs::read_to_string(dir.path().join("lowerbound_knode.csv")).unwrap();
    assert_eq!(knode.lines().count(), 5);
}
