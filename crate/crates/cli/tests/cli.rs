use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn inflap(dir: &Path, args: &[&str]) -> i32 {
    let out = Command::new(env!("CARGO_BIN_EXE_inflap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Values of a `vertex,depth,value` CSV in file order.
fn values(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("vertex"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

fn export(dir: &Path, name: &str, file: &str) {
    assert_eq!(inflap(dir, &["fixtures", "export", name, "--out", file]), 0);
}

#[test]
fn solve_the_path_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    export(d, "path:4", "path.graph");
    assert_eq!(inflap(d, &["solve", "--graph", "path.graph", "--out", "s"]), 0);
    assert_eq!(values(&d.join("s/solution.csv")), vec![0.0, 1.0, 2.0, 3.0]);
    let report = json(&d.join("s/report.json"));
    assert_eq!(report["converged"], Value::Bool(true));
    let manifest = json(&d.join("s/manifest.json"));
    assert_eq!(manifest["subcommand"], "solve");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    assert_eq!(inflap(d, &["solve", "--graph", "path.graph", "--method", "peel", "--out", "p"]), 0);
    assert_eq!(values(&d.join("p/solution.csv")), vec![0.0, 1.0, 2.0, 3.0]);
}

#[test]
fn iteration_cap_exits_with_convergence_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    export(d, "framed-grid:6", "grid.graph");
    assert_eq!(inflap(d, &["solve", "--graph", "grid.graph", "--max-iter", "2", "--out", "s"]), 3);
    let manifest = json(&d.join("s/manifest.json"));
    assert_eq!(manifest["exit_code"], 3);
}

#[test]
fn check_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(inflap(d, &["fixtures", "export", "fig1:4", "--out", "fig1.graph", "--field", "fig1.csv"]), 0);
    assert_eq!(inflap(d, &["check", "--graph", "fig1.graph", "--field", "fig1.csv", "--out", "c"]), 4);
    let report = json(&d.join("c/check.json"));
    assert_eq!(report["subharmonic"], Value::Bool(false));
    assert!(report["witness"]["vertex"].is_u64());
    assert_eq!(report["classification"].as_array().unwrap().len(), 5);

    export(d, "path:5", "path.graph");
    assert_eq!(inflap(d, &["solve", "--graph", "path.graph", "--out", "s"]), 0);
    assert_eq!(inflap(d, &["check", "--graph", "path.graph", "--field", "s/solution.csv", "--out", "c2"]), 0);
    let report = json(&d.join("c2/check.json"));
    assert_eq!(report["overall"], "harmonic");
    assert!(report["residual_norm"].as_f64().unwrap() < 1e-9);
}

#[test]
fn regularize_fig2_and_reject_a_peak() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(inflap(d, &["fixtures", "export", "fig2:3", "--out", "fig2.graph", "--field", "fig2.csv"]), 0);
    assert_eq!(inflap(d, &["regularize", "--graph", "fig2.graph", "--field", "fig2.csv", "--eps", "0.5", "--out", "r"]), 0);
    let report = json(&d.join("r/report.json"));
    assert!(report["min_slope"].as_f64().unwrap() >= 0.5 - 1e-9);
    assert!(report["violation"].is_null());

    fs::write(d.join("peak.graph"), "vertices 3\nedge 0 1\nedge 1 2\nboundary 0\nboundary 2\n").unwrap();
    fs::write(d.join("peak.csv"), "vertex,depth,value\n0,0,0\n1,1,1\n2,0,0\n").unwrap();
    assert_eq!(inflap(d, &["regularize", "--graph", "peak.graph", "--field", "peak.csv", "--eps", "0.5", "--out", "p"]), 4);
    assert_eq!(inflap(d, &["regularize", "--graph", "peak.graph", "--field", "peak.csv", "--eps", "-1", "--out", "p"]), 2);
}

#[test]
fn exhaust_the_half_plane() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["exhaust", "--oracle", "half-plane:8", "--radii", "4,8,16", "--window-r", "2", "--out", "e"];
    assert_eq!(inflap(d, &args), 0);
    let trace = json(&d.join("e/trace.json"));
    assert_eq!(trace["converged"], Value::Bool(true));
    let window = fs::read_to_string(d.join("e/window.csv")).unwrap();
    assert!(window.lines().nth(1).unwrap().starts_with("radius,vertex,label"));

    let short = ["exhaust", "--oracle", "half-plane:8", "--radii", "4,8", "--window-r", "4", "--tol", "1e-12", "--out", "f"];
    assert_eq!(inflap(d, &short), 3);
    assert_eq!(inflap(d, &["exhaust", "--oracle", "moon", "--out", "g"]), 2);
    assert_eq!(inflap(d, &["exhaust", "--oracle", "half-line", "--g", "const:2", "--radii", "4,8", "--out", "h"]), 0);
}

#[test]
fn tree_closed_form_and_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    export(d, "chain", "chain.graph");
    assert_eq!(inflap(d, &["tree", "--graph", "chain.graph", "--out", "t"]), 0);
    assert_eq!(values(&d.join("t/u.csv")), vec![0.0, -3.0, -5.0, -5.0]);
    assert_eq!(values(&d.join("t/F.csv")), vec![3.0, 2.0, 0.0]);

    export(d, "two-root:4", "two.graph");
    assert_eq!(inflap(d, &["tree", "--graph", "two.graph", "--out", "t2"]), 0);

    fs::write(d.join("big.graph"), "vertices 3\nedge 0 1\nedge 1 2\nroot 0\nf 1 1e13\nf 2 0\n").unwrap();
    assert_eq!(inflap(d, &["tree", "--graph", "big.graph", "--out", "t3"]), 4);
    assert_eq!(json(&d.join("t3/divergence.json"))["divergent"][0], 1);
}

#[test]
fn euclid_annulus_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["euclid", "--domain", "annulus", "--ref", "cone", "--eps", "0.4,0.2,0.1", "--out", "eu"];
    assert_eq!(inflap(d, &args), 0);
    let table = fs::read_to_string(d.join("eu/table.csv")).unwrap();
    assert_eq!(table.lines().count(), 2 + 3);
    let report = json(&d.join("eu/report.json"));
    assert_eq!(report["strictly_decreasing"], Value::Bool(true));
    assert_eq!(report["envelope"]["holds"], Value::Bool(true));
    assert!(fs::read_to_string(d.join("eu/solution.csv")).unwrap().contains("x,y,value"));
    assert_eq!(inflap(d, &["euclid", "--domain", "circle", "--out", "x"]), 2);
    assert_eq!(inflap(d, &["euclid", "--domain", "square", "--eps", "0.4", "--h-ratio", "2", "--out", "y"]), 2);
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    export(d, "framed-grid:5", "grid.graph");
    for out in ["a", "b"] {
        let args = ["--threads", "2", "solve", "--graph", "grid.graph", "--mode", "jacobi", "--out", out];
        assert_eq!(inflap(d, &args), 0);
    }
    for name in ["solution.csv", "report.json"] {
        assert_eq!(fs::read(d.join("a").join(name)).unwrap(), fs::read(d.join("b").join(name)).unwrap());
    }
}

#[test]
fn manifests_replay() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    export(d, "fig3:6", "fig3.graph");
    assert_eq!(inflap(d, &["tree", "--graph", "fig3.graph", "--out", "t"]), 0);
    assert_eq!(inflap(d, &["replay", "t/manifest.json", "--out", "again"]), 0);
    let report = json(&d.join("again/replay.json"));
    assert_eq!(report["outputs_match"], Value::Bool(true));
    assert_eq!(fs::read(d.join("t/u.csv")).unwrap(), fs::read(d.join("again/u.csv")).unwrap());

    assert_eq!(inflap(d, &["replay", "fig3.graph.manifest.json", "--out", "exp"]), 0);
    assert!(d.join("exp/fig3.graph").exists());

    // A changed input is detected.
    fs::write(d.join("fig3.graph"), "vertices 2\nedge 0 1\nroot 0\n").unwrap();
    assert_eq!(inflap(d, &["replay", "t/manifest.json", "--out", "changed"]), 2);
    assert_eq!(json(&d.join("changed/replay.json"))["inputs_match"], Value::Bool(false));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(inflap(d, &["frobnicate"]), 2);
    assert_eq!(inflap(d, &["solve"]), 2);
    assert_eq!(inflap(d, &["solve", "--graph", "missing.graph", "--out", "m"]), 2);
    assert_eq!(inflap(d, &["fixtures", "export", "nope", "--out", "n.graph"]), 2);
    assert_eq!(inflap(d, &["fixtures", "export", "path", "--out", "p.graph", "--field", "p.csv"]), 2);
    fs::write(d.join("bad.graph"), "vertices 2\nedge 0 9\n").unwrap();
    assert_eq!(inflap(d, &["solve", "--graph", "bad.graph", "--out", "b"]), 2);
    let manifest = json(&d.join("b/manifest.json"));
    assert!(manifest["message"].as_str().unwrap().contains("line 2"));
    assert_eq!(inflap(d, &["fixtures", "list"]), 0);
    assert_eq!(inflap(d, &["--version"]), 0);
}
