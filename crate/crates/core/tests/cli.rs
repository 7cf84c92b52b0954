//! End-to-end runs of the `imexrb` binary.

use std::path::Path;
use std::process::{Command, Output};

use imexrb::harness::RESULT_COLUMNS;

fn imexrb(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imexrb"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

const SPEC: &str = r#"{
    "name": "small",
    "problem": "advdiff2d",
    "n_per_dim": 15,
    "methods": ["FE", "BE", "IMEXRB"],
    "dts": [0.125, 0.0625],
    "epsilons": [{"gamma": 1.0}, 1e-3],
    "n_basis": [2, 5],
    "output": "out/small.csv",
    "step_log": "out/small-steps.csv"
}"#;

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn run_writes_schema_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spec.json"), SPEC).unwrap();

    let first = imexrb(&["run", "spec.json"], dir.path());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let (header, rows_a) = read_csv(&dir.path().join("out/small.csv"));
    assert_eq!(header, RESULT_COLUMNS);
    // FE and BE: 2 rows each; IMEX-RB: 2 dts x 2 epsilons x 2 N.
    assert_eq!(rows_a.len(), 2 + 2 + 8);
    assert!(dir.path().join("out/small-steps.csv").exists());

    let second = imexrb(&["--threads", "1", "run", "spec.json", "--csv", "again.csv"], dir.path());
    assert!(second.status.success());
    let (_, rows_b) = read_csv(&dir.path().join("again.csv"));
    let wall = RESULT_COLUMNS.iter().position(|&c| c == "wall_time_s").unwrap();
    for (a, b) in rows_a.iter().zip(&rows_b) {
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            if i != wall {
                assert_eq!(x, y, "column {}", RESULT_COLUMNS[i]);
            }
        }
    }
}

#[test]
fn failed_points_give_nonzero_exit_but_keep_other_rows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SPEC.replace(r#""name": "small","#, r#""name": "small", "solver": {"gmres_maxit": 1},"#);
    std::fs::write(dir.path().join("spec.json"), spec).unwrap();
    let out = imexrb(&["run", "spec.json"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("failed: BE"), "{stderr}");
    let (_, rows) = read_csv(&dir.path().join("out/small.csv"));
    assert!(rows.iter().all(|r| r[1] != "BE"));
    assert!(rows.iter().any(|r| r[1] == "FE"));
}

#[test]
fn config_errors_name_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"problem\": \"advdiff2d\",\n  \"dtz\": [0.1]\n}").unwrap();
    let out = imexrb(&["run", "bad.json"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.json:3:"), "{stderr}");
}

#[test]
fn epsbar_and_preset_errors() {
    let dir = tempfile::tempdir().unwrap();
    let ok = imexrb(&["epsbar", "advdiff2d", "21"], dir.path());
    assert!(ok.status.success());
    let value: f64 = String::from_utf8_lossy(&ok.stdout).trim().parse().unwrap();
    assert!(value > 0.0 && value < 1.0);

    let nonlinear = imexrb(&["epsbar", "burgers2d", "21"], dir.path());
    assert!(!nonlinear.status.success());
    assert!(String::from_utf8_lossy(&nonlinear.stderr).contains("nonlinear"));

    let unknown = imexrb(&["preset", "fig-nothing"], dir.path());
    assert!(!unknown.status.success());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("desk-advdiff2d"));
}

#[test]
fn desk_preset_writes_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = imexrb(&["preset", "desk-burgers-stability", "--out", "results"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = read_csv(&dir.path().join("results/desk-burgers-stability.csv"));
    // FE, BE and four tolerances.
    assert_eq!(rows.len(), 6);
    let diverged = RESULT_COLUMNS.iter().position(|&c| c == "diverged").unwrap();
    assert_eq!(rows[0][1], "FE");
    assert_eq!(rows[0][diverged], "true");
    assert!(dir.path().join("results/desk-burgers-stability-steps.csv").exists());
}
