//! Report artifacts: a deterministic JSON report, one CSV table per
//! experiment, and a separate timing file.
//!
//! Determinism contract: `report.json` and every `<experiment>.csv` are
//! byte-identical across re-runs with the same config and seed.  Anything
//! that cannot be deterministic — wall-clock timings — lives in
//! `timing.json`, which is excluded from that contract.
//!
//! CSV schema (stable, documented here and in the README): every table has
//! the columns `experiment,item,params,estimate,stderr,ci_lo,ci_hi,verdict`.
//! `item` names the row's check; `params` packs the row's parameters as
//! `key=value` pairs joined by `;`.  Deterministic rows carry stderr 0 and
//! a degenerate interval; rows without a numeric value leave the numeric
//! fields empty.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

use crate::config::RunConfig;

/// Row-level outcome.  `Fail` is the only status that fails a run;
/// `Flagged` marks a documented deviation kept visible in the artifacts,
/// and `Info` rows carry context without a judgement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
    Info,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Flagged => "flagged",
            Verdict::Info => "info",
        }
    }

    /// Collapse a pass/fail condition.
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One check within an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    /// What this row checks, named by content.
    pub item: String,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    /// Point estimate or deterministic value; `None` when the row has no
    /// single number (e.g. a structural assertion).
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub verdict: Verdict,
}

impl Row {
    /// A Monte Carlo row from a `tcbm` estimate.
    pub fn mc(
        item: impl Into<String>,
        params: impl Into<String>,
        est: &tcbm::mc::McEstimate,
        verdict: Verdict,
    ) -> Row {
        Row {
            item: item.into(),
            params: params.into(),
            estimate: finite(est.estimate),
            stderr: finite(est.stderr),
            ci_lo: finite(est.ci_lo),
            ci_hi: finite(est.ci_hi),
            verdict,
        }
    }

    /// A deterministic row: stderr 0, degenerate interval.
    pub fn exact(item: impl Into<String>, params: impl Into<String>, value: f64, verdict: Verdict) -> Row {
        Row {
            item: item.into(),
            params: params.into(),
            estimate: finite(value),
            stderr: Some(0.0),
            ci_lo: finite(value),
            ci_hi: finite(value),
            verdict,
        }
    }

    /// A row with no numeric value (structural assertions).
    pub fn note(item: impl Into<String>, params: impl Into<String>, verdict: Verdict) -> Row {
        Row {
            item: item.into(),
            params: params.into(),
            estimate: None,
            stderr: None,
            ci_lo: None,
            ci_hi: None,
            verdict,
        }
    }
}

/// Non-finite values would break both JSON determinism and downstream CSV
/// parsing; they are reported as absent instead.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Outcome of one experiment: its rows plus an aggregate verdict
/// (fail iff any row fails; flagged and info rows never fail a run).
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    /// Claim keys this experiment verifies (see the registry).
    pub claims: Vec<String>,
    /// The parameters the experiment actually ran with.
    pub config_echo: String,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
}

impl ExperimentResult {
    pub fn new(name: &str, claims: &[&str], config_echo: String, rows: Vec<Row>) -> ExperimentResult {
        let verdict = if rows.iter().any(|r| r.verdict == Verdict::Fail) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        ExperimentResult {
            name: name.to_string(),
            claims: claims.iter().map(|c| c.to_string()).collect(),
            config_echo,
            rows,
            verdict,
        }
    }
}

/// The full run report.  Field order is fixed; all collections are ordered;
/// no timestamps — byte-identical across re-runs with the same seed.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    /// Software version tag.
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub profile: String,
    /// The resolved configuration this run executed.
    pub config_echo: RunConfig,
    pub experiments: Vec<ExperimentResult>,
    pub n_pass: usize,
    pub n_fail: usize,
    pub n_flagged: usize,
    pub all_pass: bool,
}

impl Report {
    pub fn new(config: &RunConfig, experiments: Vec<ExperimentResult>) -> Report {
        let count = |v: Verdict| {
            experiments
                .iter()
                .flat_map(|e| &e.rows)
                .filter(|r| r.verdict == v)
                .count()
        };
        let all_pass = experiments.iter().all(|e| e.verdict != Verdict::Fail);
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: config.experiment.clone(),
            seed: config.seed,
            profile: config.profile.as_str().to_string(),
            config_echo: config.clone(),
            n_pass: count(Verdict::Pass),
            n_fail: count(Verdict::Fail),
            n_flagged: count(Verdict::Flagged),
            all_pass,
            experiments,
        }
    }
}

/// Wall-clock timings, kept out of the deterministic artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_experiment: Vec<(String, f64)>,
}

/// Write `report.json`, one `<experiment>.csv` per experiment, and
/// `timing.json` under `out_dir`.
pub fn write_artifacts(out_dir: &Path, report: &Report, timing: &Timing) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", out_dir.display()))?;
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(out_dir.join("report.json"), json + "\n")?;
    for exp in &report.experiments {
        let path = out_dir.join(format!("{}.csv", exp.name));
        let mut w = csv::Writer::from_path(&path)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
        w.write_record(["experiment", "item", "params", "estimate", "stderr", "ci_lo", "ci_hi", "verdict"])?;
        for row in &exp.rows {
            w.write_record([
                exp.name.as_str(),
                row.item.as_str(),
                row.params.as_str(),
                &num_field(row.estimate),
                &num_field(row.stderr),
                &num_field(row.ci_lo),
                &num_field(row.ci_hi),
                row.verdict.as_str(),
            ])?;
        }
        w.flush()?;
    }
    let timing_json = serde_json::to_string_pretty(timing)?;
    std::fs::write(out_dir.join("timing.json"), timing_json + "\n")?;
    Ok(())
}

/// Shortest round-trip float formatting (same as the JSON encoder), so the
/// CSV and JSON artifacts agree bit-for-bit on every value.
fn num_field(v: Option<f64>) -> String {
    match v {
        Some(x) => {
            let mut s = String::new();
            let _ = write!(s, "{x}");
            s
        }
        None => String::new(),
    }
}

/// One-line console summary per experiment.
pub fn print_summary(report: &Report) {
    for exp in &report.experiments {
        let (mut p, mut f, mut fl) = (0, 0, 0);
        for r in &exp.rows {
            match r.verdict {
                Verdict::Pass => p += 1,
                Verdict::Fail => f += 1,
                Verdict::Flagged => fl += 1,
                Verdict::Info => {}
            }
        }
        println!(
            "{:<20} {:<7} {p} pass, {f} fail, {fl} flagged",
            exp.name,
            exp.verdict.as_str()
        );
    }
    println!(
        "overall: {} ({} pass, {} fail, {} flagged)",
        if report.all_pass { "PASS" } else { "FAIL" },
        report.n_pass,
        report.n_fail,
        report.n_flagged
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, Profile};
    use std::path::PathBuf;

    fn dummy_config() -> RunConfig {
        RunConfig {
            experiment: "demo".into(),
            seed: 1,
            profile: Profile::Smoke,
            out: PathBuf::from("out"),
            overrides: Overrides::default(),
        }
    }

    #[test]
    fn aggregate_verdict_fails_only_on_fail_rows() {
        let ok = ExperimentResult::new(
            "demo",
            &["x"],
            String::new(),
            vec![
                Row::note("a", "", Verdict::Pass),
                Row::note("b", "", Verdict::Flagged),
                Row::note("c", "", Verdict::Info),
            ],
        );
        assert_eq!(ok.verdict, Verdict::Pass);
        let bad = ExperimentResult::new(
            "demo",
            &["x"],
            String::new(),
            vec![Row::note("a", "", Verdict::Fail)],
        );
        assert_eq!(bad.verdict, Verdict::Fail);
    }

    #[test]
    fn non_finite_values_become_absent() {
        let r = Row::exact("x", "", f64::INFINITY, Verdict::Info);
        assert_eq!(r.estimate, None);
        assert_eq!(r.stderr, Some(0.0));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"estimate\":null"));
    }

    #[test]
    fn artifacts_are_deterministic_and_timing_is_separate() {
        let cfg = dummy_config();
        let rows = vec![
            Row::exact("value", "k=1", 0.25, Verdict::Pass),
            Row::note("structure", "", Verdict::Flagged),
        ];
        let exp = ExperimentResult::new("demo", &["claim-a"], "n=10".into(), rows);
        let report = Report::new(&cfg, vec![exp]);

        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let t1 = Timing { total_seconds: 1.0, per_experiment: vec![("demo".into(), 1.0)] };
        let t2 = Timing { total_seconds: 99.0, per_experiment: vec![("demo".into(), 99.0)] };
        write_artifacts(dir1.path(), &report, &t1).unwrap();
        write_artifacts(dir2.path(), &report, &t2).unwrap();

        let j1 = std::fs::read(dir1.path().join("report.json")).unwrap();
        let j2 = std::fs::read(dir2.path().join("report.json")).unwrap();
        assert_eq!(j1, j2, "report.json must not depend on timing");
        let c1 = std::fs::read(dir1.path().join("demo.csv")).unwrap();
        let c2 = std::fs::read(dir2.path().join("demo.csv")).unwrap();
        assert_eq!(c1, c2);

        let timing: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir1.path().join("timing.json")).unwrap())
                .unwrap();
        assert_eq!(timing["total_seconds"], 1.0);
        let report_text = String::from_utf8(j1).unwrap();
        assert!(!report_text.contains("seconds"), "no timing inside report.json");
    }

    #[test]
    fn csv_schema_is_stable() {
        let cfg = dummy_config();
        let exp = ExperimentResult::new(
            "demo",
            &["claim-a"],
            String::new(),
            vec![Row::exact("v", "a=1;b=2", 1.5, Verdict::Pass)],
        );
        let report = Report::new(&cfg, vec![exp]);
        let dir = tempfile::tempdir().unwrap();
        let timing = Timing { total_seconds: 0.0, per_experiment: vec![] };
        write_artifacts(dir.path(), &report, &timing).unwrap();
        let text = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,item,params,estimate,stderr,ci_lo,ci_hi,verdict"
        );
        assert_eq!(lines.next().unwrap(), "demo,v,a=1;b=2,1.5,0,1.5,1.5,pass");
    }
}
