//! Acceptance gate: eight end-to-end checks at verification-grade
//! parameters, one printed pass/fail line each (visible with
//! `cargo test --test acceptance -- --nocapture`).  Every check pins the
//! run seed, judges only hard verdicts (flagged rows report, never fail),
//! and asserts its wall-clock budget.

use std::sync::Mutex;
use std::time::Instant;
use tcbm_lab::config::{Overrides, Profile};
use tcbm_lab::experiments::{self, Ctx};
use tcbm_lab::report::{ExperimentResult, Verdict};

/// One check at a time even if the harness is given threads: the budgets
/// below are single-run wall-clock budgets.
static SERIAL: Mutex<()> = Mutex::new(());

const SEED: u64 = 42;

fn full_ctx() -> Ctx {
    Ctx {
        seed: SEED,
        profile: Profile::Full,
        overrides: Overrides::default(),
    }
}

fn run_full(name: &str) -> (ExperimentResult, f64) {
    let t0 = Instant::now();
    let res = experiments::run_experiment(name, &full_ctx())
        .unwrap_or_else(|e| panic!("{name} failed to run: {e}"));
    (res, t0.elapsed().as_secs_f64())
}

fn failing_rows(res: &ExperimentResult) -> Vec<String> {
    res.rows
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| format!("{} [{}]", r.item, r.params))
        .collect()
}

fn report_line(idx: u32, label: &str, ok: bool, elapsed: f64, cap: f64) {
    println!(
        "acceptance {idx}/8 {label}: {} ({elapsed:.1}s < {cap:.0}s)",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn assert_clean(idx: u32, label: &str, res: &ExperimentResult, elapsed: f64, cap: f64) {
    let bad = failing_rows(res);
    report_line(idx, label, bad.is_empty() && elapsed < cap, elapsed, cap);
    assert!(bad.is_empty(), "{label}: failing rows: {bad:#?}");
    assert!(elapsed < cap, "{label}: {elapsed:.1}s exceeded {cap:.0}s");
}

/// Meeting-time law of the mirror coupling: empirical tail within three
/// standard errors of 2Φ(a/√t) − 1 on the (a, t) grid and below the
/// doubled Gaussian envelope; the tighter half-width envelope may flag.
#[test]
fn meeting_time_tail_matches_reflection_law() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("meeting-tail");
    let cells = res.rows.iter().filter(|r| r.item == "meeting-tail").count();
    assert!(cells >= 9, "expected the full (a,t) grid, saw {cells} cells");
    assert_clean(1, "meeting-time-tail", &res, el, 120.0);
}

/// Stopped-distance moments: E|Z − Z̃|^θ stays below |x − y|^θ within
/// one-sided three-σ slack for θ ∈ {1/4, 1/2, 1} across stopping rules,
/// with equality at θ = 1 for deterministic times.
#[test]
fn stopped_distance_moments_respect_theta_bounds() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("stopped-moments");
    assert!(
        res.rows.iter().any(|r| r.item == "fixed-time-equality"),
        "equality-at-θ=1 row missing"
    );
    assert_clean(2, "stopped-distance-moments", &res, el, 120.0);
}

/// Exit clocks against Green integrals: interval clock mean 1/4 ± 2%,
/// ball exit means r²/d ± 2% for d ∈ {1,2,3}, and E_x[A_τ] ≤ C ζ(r,κ)
/// with the explicit constant on a 3×3 grid for every shipped family.
#[test]
fn exit_clocks_match_green_integrals_and_zeta_bound() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("green-exit");
    let grid = res.rows.iter().filter(|r| r.item == "exit-mass-bound").count();
    assert_eq!(grid, 54, "expected 6 families × 9 cells, saw {grid}");
    assert_clean(3, "green-exit", &res, el, 300.0);
}

/// Revuz duality: the clock pairing ∫E_x[∫ e^{-αt} g(X) dA] f dx agrees
/// with the measure pairing within three combined standard errors.
#[test]
fn revuz_pairing_agrees_between_clock_and_measure_sides() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("revuz");
    assert!(
        res.rows.iter().any(|r| r.item == "duality-agreement"),
        "duality-agreement row missing"
    );
    assert_clean(4, "revuz-duality", &res, el, 120.0);
}

/// Index machinery at closed-form precision: recursion vs closed form,
/// positivity equivalence on the (d, κ, ε) grid, η-chain identity,
/// conjugate product, and the floor/limit relations, all ≤ 1e-12.
#[test]
fn exponent_index_identities_hold_at_float_precision() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("indices");
    assert_clean(5, "exponent-indices", &res, el, 1.0);
}

/// Coupled resolvent difference against the clipped-clock bound
/// 2(1 + 1/α)(Î_x + Î_y) + 3σ on six separations for the regular and
/// singular family, sup-norm-1 readouts.
#[test]
fn resolvent_difference_obeys_clipped_clock_bound() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("diff-bound");
    let pairs = res.rows.iter().filter(|r| r.item == "difference-bound").count();
    assert!(pairs >= 12, "expected 6 separations × 2 configurations, saw {pairs}");
    assert_clean(6, "difference-bound", &res, el, 600.0);
}

/// Hölder scaling of the resolvent difference: fitted log-log slope over
/// four dyadic scales at 10⁶ coupled paths per scale reaches ≥ 0.35 with
/// slope stderr < 0.1 for the singular d=3 family (predicted 1/2 − ε),
/// and ≥ 0.85 for the regular d=1 case.
#[test]
fn holder_slope_reflects_kappa_driven_exponent() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (res, el) = run_full("holder");
    assert!(res.config_echo.contains("scales=4"), "dyadic scales: {}", res.config_echo);
    assert!(
        res.rows.iter().any(|r| {
            r.item == "scale-difference"
                && r.params.contains("radial-power")
                && r.params.contains("n=1000000")
        }),
        "singular case must run 10^6 coupled paths per scale"
    );
    let slopes: Vec<_> = res.rows.iter().filter(|r| r.item == "fitted-slope").collect();
    assert_eq!(slopes.len(), 2, "two fitted slopes expected");
    assert_clean(7, "holder-slope", &res, el, 1800.0);
}

/// Determinism and coupling efficiency: two `run verify-all --seed 42`
/// invocations produce byte-identical reports and CSVs (timing kept
/// separate), exit 0, and the coupled-difference estimator achieves at
/// most half the independent-difference variance at separation 0.05.
#[test]
fn verify_all_is_deterministic_and_coupling_halves_variance() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t0 = Instant::now();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_tcbm-lab"))
            .args([
                "run",
                "verify-all",
                "--seed",
                "42",
                "--profile",
                "smoke",
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "verify-all failed:\n{}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let report_a = std::fs::read(dirs[0].path().join("report.json")).unwrap();
    let report_b = std::fs::read(dirs[1].path().join("report.json")).unwrap();
    assert_eq!(report_a, report_b, "report.json differs between identical seeds");
    let mut csvs = 0;
    for entry in std::fs::read_dir(dirs[0].path()).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_str().unwrap().to_owned();
        if name.ends_with(".csv") {
            csvs += 1;
            let a = std::fs::read(dirs[0].path().join(&name)).unwrap();
            let b = std::fs::read(dirs[1].path().join(&name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical seeds");
        }
    }
    assert!(csvs >= 14, "one CSV per experiment expected, saw {csvs}");

    let report: serde_json::Value = serde_json::from_slice(&report_a).unwrap();
    let variance = report["experiments"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "variance")
        .expect("variance experiment present");
    let ratio_row = variance["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["item"] == "variance-ratio")
        .expect("variance-ratio row present");
    assert_eq!(ratio_row["verdict"], "pass", "variance ratio row failed");
    let ratio = ratio_row["estimate"].as_f64().unwrap();
    let el = t0.elapsed().as_secs_f64();
    report_line(8, "determinism-and-variance", ratio <= 0.5 && el < 300.0, el, 300.0);
    assert!(ratio <= 0.5, "coupled/independent variance ratio {ratio} > 0.5");
    assert!(el < 300.0, "two smoke verify-all runs took {el:.1}s");
}
