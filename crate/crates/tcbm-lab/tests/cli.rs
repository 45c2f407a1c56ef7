//! End-to-end tests of the `tcbm-lab` binary: argument handling, catalog
//! listing, artifact determinism, and config-file/flag precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tcbm-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn list_shows_every_catalog_experiment() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for exp in tcbm_lab::registry::CATALOG {
        assert!(text.contains(exp.name), "missing {} in list output", exp.name);
    }
}

#[test]
fn list_verbose_shows_every_claim() {
    let out = run(&["list", "--verbose"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for claim in tcbm_lab::registry::CLAIMS {
        assert!(text.contains(claim.key), "missing claim {}", claim.key);
    }
}

#[test]
fn run_without_seed_or_experiment_exits_2_and_lists_violations() {
    let out = run(&["run"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("configuration invalid"), "got: {err}");
    assert!(err.contains("seed"), "seed violation missing: {err}");
    assert!(err.contains("experiment"), "experiment violation missing: {err}");
}

#[test]
fn run_unknown_experiment_exits_2() {
    let out = run(&["run", "no-such-experiment", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no-such-experiment"));
}

#[test]
fn run_rejects_bad_numeric_overrides_with_all_violations_at_once() {
    let out = run(&[
        "run",
        "indices",
        "--seed",
        "1",
        "--dt",
        "-0.5",
        "--eps",
        "2.0",
        "--d",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("dt:"), "dt violation missing: {err}");
    assert!(err.contains("eps:"), "eps violation missing: {err}");
    assert!(err.contains("d:"), "dimension violation missing: {err}");
}

#[test]
fn indices_subcommand_prints_standalone_csv() {
    let out = run(&["indices", "--d", "3", "--kappa", "1.5", "--eps", "0.05", "--n", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,kappa,eps,n,r,q,a,b,eta,limit_exponent,min_depth"
    );
    assert_eq!(lines.count(), 5, "one row per depth");
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

#[test]
fn same_seed_runs_produce_identical_artifacts_with_timing_kept_separate() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let out = run(&[
            "run",
            "indices",
            "--seed",
            "7",
            "--profile",
            "smoke",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    for name in ["report.json", "indices.csv", "indices-table.csv"] {
        assert_eq!(
            read(a.path(), name),
            read(b.path(), name),
            "{name} differs between identical runs"
        );
    }
    // Wall-clock measurements live only in timing.json, never in the report.
    assert!(a.path().join("timing.json").exists());
    assert!(!String::from_utf8(read(a.path(), "report.json"))
        .unwrap()
        .contains("seconds"));
}

#[test]
fn cli_flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("artifacts");
    let cfg_path = dir.path().join("lab.toml");
    fs::write(
        &cfg_path,
        format!(
            "experiment = \"indices\"\nseed = 9\nprofile = \"smoke\"\nout = \"{}\"\n\n[overrides]\nd = 2\nkappa = 1.2\neps = 0.05\nn = 4\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = run(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--n",
        "6",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let table = String::from_utf8(read(&out_dir, "indices-table.csv")).unwrap();
    // The flag wins over the file: depth 6, not 4.
    assert_eq!(table.lines().count(), 7, "header plus one row per depth");
    assert!(table.lines().nth(1).unwrap().starts_with("2,1.2,0.05,1,"));
}

#[test]
fn config_file_with_unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("lab.toml");
    fs::write(&cfg_path, "experiment = \"indices\"\nseed = 1\nbogus = 3\n").unwrap();
    let out = run(&["run", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}
