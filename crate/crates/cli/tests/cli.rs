use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qb"))
        .args(args)
        .current_dir(dir)
        .env_remove("QB_THREADS")
        .output()
        .expect("qb runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(dir: &Path, rel: &str) -> String {
    std::fs::read_to_string(dir.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

#[test]
fn trace_layout_and_sidecar() {
    let tmp = TempDir::new().unwrap();
    let out = qb(&["trace", "--n", "10", "--g", "0.5", "--eta", "0", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "o/trace.csv");
    let mut lines = csv.split('\n');
    assert_eq!(lines.next(), Some("t,energy,power,fluctuation,sz_ratio"));
    assert_eq!(lines.next(), Some("0,0,0,0,-1"));
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    let peak = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((peak - 6.768).abs() < 0.05, "peak {peak}");

    let sidecar: serde_json::Value = serde_json::from_str(&read(tmp.path(), "o/trace.json")).unwrap();
    assert_eq!(sidecar["params"]["n_tls"], 10);
    assert_eq!(sidecar["params"]["g"], 0.5);
    assert_eq!(sidecar["units"]["energy"], "omega_a");
    assert_eq!(sidecar["validation"], "resonant");
    assert!(tmp.path().join("o/trace.svg").exists());
}

#[test]
fn flags_override_config() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("c.json"),
        r#"{"params": {"n_tls": 3, "g": 0.1, "eta": 1.0}, "protocol": {"coarse_points": 300}, "formats": ["csv", "json"]}"#,
    )
    .unwrap();
    let out = qb(&["extrema", "--config", "c.json", "--g", "0.7", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let sidecar: serde_json::Value = serde_json::from_str(&read(tmp.path(), "o/extrema.json")).unwrap();
    assert_eq!(sidecar["params"]["g"], 0.7);
    assert_eq!(sidecar["params"]["eta"], 1.0);
    assert_eq!(sidecar["params"]["n_tls"], 3);
    assert_eq!(sidecar["protocol"]["coarse_points"], 300);
    assert!(sidecar["details"]["report"]["e_max"].is_number());
    assert!(!tmp.path().join("o/extrema.svg").exists());

    let out = qb(&["extrema", "--n", "2", "--omega-c", "1.5", "--out", "off"], tmp.path());
    assert_eq!(code(&out), 0);
    let sidecar: serde_json::Value = serde_json::from_str(&read(tmp.path(), "off/extrema.json")).unwrap();
    assert_eq!(sidecar["validation"], "unvalidated");
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        let out = qb(&["reproduce", "--jobs", "energy-interaction", "--out", dir], tmp.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let out = qb(&["trace", "--n", "6", "--g", "0.3", "--omega", "0.4", "--out", dir], tmp.path());
        assert_eq!(code(&out), 0);
    }
    for file in ["energy-interaction/extrema.csv", "report.md", "trace.csv", "trace.json"] {
        assert_eq!(read(tmp.path(), &format!("a/{file}")), read(tmp.path(), &format!("b/{file}")), "{file}");
    }
    assert!(read(tmp.path(), "a/report.md").contains("18 of 18 checks within tolerance"));
}

#[test]
fn usage_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("empty.json"), "").unwrap();
    let out = qb(&["trace", "--config", "empty.json"], tmp.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    assert_eq!(code(&qb(&[], tmp.path())), 1);
    assert_eq!(code(&qb(&["frobnicate"], tmp.path())), 1);
    assert_eq!(code(&qb(&["reproduce", "--jobs", "nope"], tmp.path())), 1);
    assert_eq!(code(&qb(&["sweep"], tmp.path())), 1);
    assert_eq!(code(&qb(&["trace", "--g", "-1"], tmp.path())), 1);
    assert_eq!(code(&qb(&["--help"], tmp.path())), 0);
}

#[test]
fn environment_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("blocker"), "").unwrap();
    assert_eq!(code(&qb(&["trace", "--n", "2", "--out", "blocker/sub"], tmp.path())), 2);
    assert_eq!(code(&qb(&["trace", "--config", "missing.json"], tmp.path())), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_qb"))
        .args(["trace", "--n", "2", "--out", "o"])
        .current_dir(tmp.path())
        .env("QB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);

    // 31 × 101 basis states exceed a guard of 1000
    let out = qb(&["trace", "--n", "30", "--cutoff-factor", "1", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0);
    std::fs::write(tmp.path().join("g.json"), r#"{"params": {"n_tls": 30, "max_dim": 1000}}"#).unwrap();
    assert_eq!(code(&qb(&["trace", "--config", "g.json", "--out", "o"], tmp.path())), 2);
}

#[test]
fn partial_sweep_exits_3_after_writing() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("s.json"),
        r#"{"sweep": {"axis1": {"axis": "g", "values": [0.2, 0.6]},
                      "axis2": {"axis": "n_tls", "values": [2, 2.5, 3]},
                      "quantity": "p_max"}}"#,
    )
    .unwrap();
    let out = qb(&["sweep", "--config", "s.json", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 3);
    let csv = read(tmp.path(), "o/sweep.csv");
    assert!(csv.starts_with("axis1,axis2,value\n"));
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.contains("\n0.2,2.5,\n"));
}

#[test]
fn scaling_and_convergence_outputs() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("s.json"),
        r#"{"params": {"g": 0.5}, "scaling": {"n_values": [1, 2, 3, 4, 5],
            "series": [{"label": "plain"}, {"label": "driven", "params": {"omega_drive": 2.0}}]}}"#,
    )
    .unwrap();
    let out = qb(&["scaling", "--config", "s.json", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let alphas = read(tmp.path(), "o/alphas.csv");
    assert!(alphas.starts_with("label,alpha,beta,residual\nplain,"));
    assert!(alphas.contains("\ndriven,"));
    let curve = read(tmp.path(), "o/scaling_plain.csv");
    assert!(curve.starts_with("N,p_max_normalized\n1,"));
    assert_eq!(curve.lines().count(), 6);

    let out = qb(&["convergence", "--n", "4", "--factors", "1,2,3", "--out", "c"], tmp.path());
    assert_eq!(code(&out), 0);
    let conv = read(tmp.path(), "c/convergence.csv");
    assert!(conv.starts_with("factor,e_max,p_max,delta_e_max,delta_p_max\n1,"));
    assert_eq!(conv.lines().count(), 4);
}

#[test]
fn phase_writes_critical_line() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("p.json"),
        r#"{"params": {"n_tls": 4}, "phase": {"g": [0.1, 0.2], "eta": {"axis": "eta", "start": -2, "stop": 2, "count": 9}}}"#,
    )
    .unwrap();
    let out = qb(&["phase", "--config", "p.json", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let critical = read(tmp.path(), "o/critical.csv");
    let rows: Vec<Vec<f64>> = critical
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(critical.starts_with("g,eta_c\n"));
    assert_eq!(rows.len(), 2);
    // η_c = ω_a − 4g²N/ω_c
    for (row, (g, eta_c)) in rows.iter().zip([(0.1, 0.84), (0.2, 0.36)]) {
        assert_eq!(row[0], g);
        assert!((row[1] - eta_c).abs() < 1e-12);
    }
    assert_eq!(read(tmp.path(), "o/sweep.csv").lines().count(), 19);
}
