use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use trochoid::ensemble::{CycleLayout, EnsembleSpec};
use trochoid_cli::FigurePreset;

fn trochoid(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trochoid")).args(args).current_dir(dir).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const REGULAR_60: &str =
    r#"{"ensemble": {"kind": "regular-cyclic", "n": 60, "d": 2, "k": 3, "weight": 1.0, "layout": "periodic"}, "seeds": [0, 1]}"#;

#[test]
fn generates_single_triangle() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"ensemble": {"kind": "regular-cyclic", "n": 3, "d": 1, "k": 3, "weight": 1.0}, "seeds": [0]}"#,
    );
    let out = trochoid(&["generate", "-c", "c.json", "--out", "g"], dir.path());
    let listing = stdout_json(&out);
    assert_eq!(listing.as_array().unwrap().len(), 1);
    let mtx = std::fs::read_to_string(dir.path().join("g/seed-0.mtx")).unwrap();
    let lines: Vec<&str> = mtx.lines().collect();
    assert!(lines[0].starts_with("%%MatrixMarket matrix coordinate real general"));
    assert_eq!(lines[1], "3 3 3");
    assert_eq!(lines.len(), 5);
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g/seed-0.cycles.json")).unwrap()).unwrap();
    assert_eq!(sidecar["cycles"].as_array().unwrap().len(), 1);
}

#[test]
fn indivisible_spec_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"ensemble": {"kind": "regular-cyclic", "n": 10, "d": 1, "k": 3, "weight": 1.0}, "seeds": [0]}"#,
    );
    let out = trochoid(&["generate", "-c", "c.json", "--out", "g"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "invalid-spec");
    assert_eq!(err["exit_code"], 2);
    assert!(!dir.path().join("g/seed-0.mtx").exists());
}

#[test]
fn empty_seed_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"ensemble": {"kind": "regular-cyclic", "n": 60, "d": 2, "k": 3, "weight": 1.0}, "seeds": []}"#,
    );
    let out = trochoid(&["verify", "-c", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["kind"], "invalid-config");
}

#[test]
fn bad_usage_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = trochoid(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["kind"], "invalid-config");

    let out = trochoid(&["verify", "-c", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["kind"], "io");

    write(dir.path(), "c.json", r#"{"ensemble": {"kind": "regular-cyclic", "n": 60,"#);
    assert_eq!(trochoid(&["verify", "-c", "c.json"], dir.path()).status.code(), Some(2));

    assert!(trochoid(&["--help"], dir.path()).status.success());
}

#[test]
fn verify_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", REGULAR_60);
    let run = |tag: &str, threads: &str| {
        let report = format!("{tag}.json");
        let out = Command::new(env!("CARGO_BIN_EXE_trochoid"))
            .args(["verify", "-c", "c.json", "--out", tag, "--report", &report, "--svg"])
            .env("TROCHOID_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        (read(&report), read(&format!("{tag}/spectrum-seed-1.csv")), read(&format!("{tag}/verify-seed-1.svg")))
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "2"));

    let report: Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(report["aggregate"]["seeds_ok"], 2);
    let seed = &report["seeds"][0];
    assert_eq!(seed["status"], "ok");
    assert_eq!(seed["containment"]["excluded_outliers"].as_array().unwrap().len(), 3);
    assert!(seed["rotation"]["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(seed["rotation"]["order"], 3);
}

#[test]
fn invalid_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", REGULAR_60);
    let out = Command::new(env!("CARGO_BIN_EXE_trochoid"))
        .args(["moments", "-c", "c.json"])
        .env("TROCHOID_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", REGULAR_60);
    let report = stdout_json(&trochoid(
        &["verify", "-c", "c.json", "--seed", "5", "--inflation", "0.1", "--keep-outliers", "--no-moments"],
        dir.path(),
    ));
    assert_eq!(report["inflation"], 0.1);
    assert_eq!(report["exclude_outliers"], false);
    let seeds = report["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 1);
    assert_eq!(seeds[0]["seed"], 5);
    assert!(seeds[0].get("moments").is_none());
    assert!(seeds[0]["containment"]["excluded_outliers"].as_array().unwrap().is_empty());
}

#[test]
fn moments_table_matches_walk_counts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", REGULAR_60);
    let table = stdout_json(&trochoid(&["moments", "-c", "c.json"], dir.path()));
    let pure3 = table["moments"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["order"]["kind"] == "pure" && m["order"]["k"] == 3)
        .unwrap();
    assert_eq!(pure3["predicted"], 2.0);
    // Accidental triangles add O(d^3 / n) at this size.
    assert!((pure3["empirical"].as_f64().unwrap() - 2.0).abs() < 0.2, "{pure3}");
}

#[test]
fn boundary_command_writes_curve_and_density() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"ensemble": {"kind": "dense-elliptic", "n": 50, "rho": 0.4}, "seeds": [0], "samples": 512}"#,
    );
    let out = trochoid(&["boundary", "-c", "c.json", "--density", "mu.csv", "--grid", "20"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curve = String::from_utf8(out.stdout).unwrap();
    assert_eq!(curve.lines().next(), Some("phi,re,im"));
    assert_eq!(curve.lines().count(), 513);
    let density = std::fs::read_to_string(dir.path().join("mu.csv")).unwrap();
    assert_eq!(density.lines().next(), Some("re,im,mu"));
    assert_eq!(density.lines().count(), 401);
}

#[test]
fn render_is_deterministic_and_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "s.csv", "re,im\n0.5,0.1\n-0.2,-0.4\n");
    write(dir.path(), "b.csv", "phi,re,im\n0,1,0\n1.5707963,0,1\n3.1415926,-1,0\n4.712389,0,-1\n");
    let render = |out: &str| {
        let o = trochoid(&["render", "--spectrum", "s.csv", "--boundary", "b.csv", "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = render("a.svg");
    assert_eq!(a, render("b.svg"));
    assert!(String::from_utf8(a).unwrap().starts_with("<?xml"));

    write(dir.path(), "empty.csv", "re,im\n");
    let out = trochoid(&["render", "--spectrum", "empty.csv", "--out", "e.svg"], dir.path());
    assert!(!out.status.success());
    assert!(!dir.path().join("e.svg").exists());

    write(dir.path(), "bad.csv", "re,im\n0.5,0.1\n0.5,oops\n");
    let out = trochoid(&["render", "--spectrum", "bad.csv", "--out", "x.svg"], dir.path());
    let err = stderr_json(&out);
    assert_eq!(err["line"], 3, "{err}");
}

#[test]
fn calibrate_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let zero = stdout_json(&trochoid(&["calibrate", "--n", "40", "--k", "3", "--target", "0"], dir.path()));
    assert_eq!(zero["flip_prob"], 0.0);

    let out = trochoid(&["calibrate", "--n", "40", "--k", "3", "--target", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["kind"], "calibration");
    let [lo, hi] = [&err["achievable"][0], &err["achievable"][1]].map(|v| v.as_f64().unwrap());
    assert!(lo < hi && hi < 10.0);

    let neg = stdout_json(&trochoid(&["calibrate", "--n", "100", "--k", "3", "--target", "-0.1", "--seed", "2,3"], dir.path()));
    let rho = neg["mean_rho"].as_f64().unwrap();
    assert!((rho / -0.1 - 1.0).abs() <= 0.1, "{rho}");
}

#[test]
fn preset_print_and_unknown_name() {
    let dir = tempfile::tempdir().unwrap();
    let printed = stdout_json(&trochoid(&["preset", "fig1-right", "--print"], dir.path()));
    let ens = &printed["config"]["ensemble"];
    assert_eq!(ens["kind"], "regular-cyclic");
    assert_eq!((ens["n"].as_u64(), ens["d"].as_u64(), ens["k"].as_u64()), (Some(999), Some(2), Some(3)));
    assert_eq!(ens["layout"], "periodic");

    let printed = stdout_json(&trochoid(&["preset", "fig1-left", "--print"], dir.path()));
    assert_eq!(printed["calibration"]["rho"], 0.075);

    let out = trochoid(&["preset", "fig9"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig4_report_carries_continuation_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let report = stdout_json(&trochoid(&["preset", "fig4", "--seed", "0", "--no-moments"], dir.path()));
    assert_eq!(report["metadata"]["preset"], "fig4");
    assert_eq!(report["boundary"]["law"], "mixed-cycle");
    let diag = &report["boundary"]["diagnostics"];
    assert!(diag["steps"].as_u64().unwrap() >= 512);
    assert!(diag["max_residual"].as_f64().unwrap() < 1e-10);
    assert!(report["aggregate"]["inside_fraction_min"].as_f64().unwrap() >= 0.95);
}

#[test]
fn preset_parameters_are_pinned() {
    let dense = |p: FigurePreset| match p.ensemble() {
        EnsembleSpec::DenseCyclic(s) => (s.n, s.k),
        other => panic!("{other:?}"),
    };
    assert_eq!(dense(FigurePreset::Fig1Left), (1000, 5));
    let target = FigurePreset::Fig1Left.calibration().unwrap();
    assert_eq!((target.k, target.rho), (5, 0.075));

    let EnsembleSpec::RegularCyclic(s) = FigurePreset::Fig1Right.ensemble() else { panic!() };
    assert_eq!((s.n, s.d, s.k, s.weight, s.layout), (999, 2, 3, 1.0, CycleLayout::Periodic));

    assert_eq!(dense(FigurePreset::Fig2), (1000, 3));
    assert_eq!(FigurePreset::Fig2.calibration().unwrap().rho, 0.2);

    let EnsembleSpec::RegularCyclic(s) = FigurePreset::Fig3Top.ensemble() else { panic!() };
    assert_eq!((s.n, s.d, s.k), (1000, 2, 4));

    let EnsembleSpec::PoissonCyclic(s) = FigurePreset::Fig3Bottom.ensemble() else { panic!() };
    assert_eq!((s.n, s.mean_degree, s.k), (1000, 8.0, 4));

    let EnsembleSpec::MixedCyclic(s) = FigurePreset::Fig4.ensemble() else { panic!() };
    assert_eq!(s.n, 996);
    assert_eq!([(s.species[0].d, s.species[0].k), (s.species[1].d, s.species[1].k)], [(4, 3), (4, 4)]);
    assert!(s.species.iter().all(|c| c.weight == 1.0));

    for p in FigurePreset::ALL {
        let expected = if matches!(p, FigurePreset::Fig3Bottom | FigurePreset::Fig4) { 0.05 } else { 0.03 };
        assert_eq!(p.inflation(), expected, "{p}");
    }
}
