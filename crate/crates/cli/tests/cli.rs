use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bihns(dir: &Path, mode: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{mode}.json"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_bihns"))
        .arg(mode)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    (output, out)
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn summary(out: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn zero_data_solve_writes_zeros_and_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"solve": {"family": "navier", "modes": 16, "horizon": 0.002, "snapshots": 3, "grid_points": 9}}"#;
    let (o, out) = bihns(dir.path(), "solve", cfg, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("field.csv"));
    assert_eq!(rows.len(), 3 * 9);
    for r in &rows {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
        assert_eq!(&r[4], "solution:u(x,t)");
    }
    let s = summary(&out);
    assert_eq!(s["pass"], true);
    assert_eq!(s["mode"], "solve");
    assert!(s["results"]["existence_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_configs_exit_2_without_artifacts() {
    let cases = [
        ("solve", r#"{"solve": {"family": "navier", "s": 1.5}}"#, "s ≠ n+1/2"),
        ("solve", r#"{"solve": {"family": "dirichlet", "s": 1.0}}"#, "10/7"),
        ("solve", r#"{"solve": {"family": "navier", "bogus": 1}}"#, "bogus"),
        ("optimality", r#"{"optimality": {"order": 1}}"#, "order"),
        ("lambda4", "{ not json", "line 1"),
    ];
    for (mode, cfg, needle) in cases {
        let dir = TempDir::new().unwrap();
        let (o, out) = bihns(dir.path(), mode, cfg, &[]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{cfg}: {err}");
        assert!(err.contains(needle), "{cfg}: {err}");
        assert!(!out.exists(), "{cfg} left artifacts");
    }
}

#[test]
fn unknown_mode_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (o, out) = bihns(dir.path(), "frobnicate", "{}", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn optimality_run_has_monotone_ratio_table() {
    let dir = TempDir::new().unwrap();
    let (o, out) = bihns(dir.path(), "optimality", r#"{"optimality": {"alpha": 0.6, "beta": 3.4}}"#, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("ratios.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| &r[4] == "true"));
    let ratios: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(ratios.last().unwrap() / ratios[0] >= 1.2);
    assert_eq!(summary(&out)["pass"], true);
    let plot = std::fs::read_to_string(out.join("plot_ratio.csv")).unwrap();
    assert!(plot.starts_with("x,y,anchor\r\n"));
}

#[test]
fn runtime_failure_exits_3_with_error_record() {
    let dir = TempDir::new().unwrap();
    // A single Picard iteration with an unreachable tolerance cannot converge.
    let cfg = r#"{"solve": {"family": "navier", "modes": 16, "horizon": 2e-4, "max_iter": 1, "tol": 1e-30,
                 "initial": {"kind": "sine_modes", "coefficients": [[1, 0]]}}}"#;
    let (o, out) = bihns(dir.path(), "solve", cfg, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("error.json")).unwrap()).unwrap();
    assert_eq!(rec["kind"], "NoConvergence");
    assert!(!out.join("summary.json").exists());
}

#[test]
fn failed_check_exits_1() {
    let dir = TempDir::new().unwrap();
    let (o, out) = bihns(dir.path(), "lambda4", r#"{"lambda4": {"k_max": 20, "max_multiplicity": 0}}"#, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(&out)["pass"], false);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL] max_multiplicity"));
}

#[test]
fn identical_seed_gives_identical_bytes() {
    let cfg = r#"{"kato_sweep": {"s_grid": [1.0], "orders": [0, 2], "ensemble": 8, "modes": 64}}"#;
    let run = |threads: &str, seed: &str| {
        let dir = TempDir::new().unwrap();
        let cfg_path = dir.path().join("k.json");
        std::fs::write(&cfg_path, cfg).unwrap();
        let out = dir.path().join("out");
        let o = Command::new(env!("CARGO_BIN_EXE_bihns"))
            .args(["kato_sweep", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .args(["--seed", seed])
            .env("BIHNS_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.code().unwrap() <= 1);
        ["sweep.csv", "sweep_samples.csv", "summary.json"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    let a = run("1", "7");
    assert_eq!(a, run("4", "7"));
    assert_ne!(a[1], run("2", "8")[1]);
}

#[test]
fn traces_and_identities_emit_their_tables() {
    let dir = TempDir::new().unwrap();
    let (o, out) = bihns(dir.path(), "traces", r#"{"traces": {"ensemble": 2}}"#, &["--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let book = read_csv(&out.join("bookkeeping.csv"));
    let all: Vec<&str> = book.iter().map(|r| r.get(4).unwrap()).collect();
    assert_eq!(all, ["false", "false", "true", "true"]);
    assert_eq!(read_csv(&out.join("trace_constants.csv")).len(), 8);

    let dir = TempDir::new().unwrap();
    let (o, out) = bihns(dir.path(), "identities", "{}", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv(&out.join("identity_residuals.csv")).len(), 6);
}

#[test]
fn emit_flags_select_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"emit": {"plot": false, "json": false}, "lambda4": {"k_max": 10}}"#;
    let (o, out) = bihns(dir.path(), "lambda4", cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["histogram.csv"]);
}
