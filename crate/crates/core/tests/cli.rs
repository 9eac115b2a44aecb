use std::path::Path;
use std::process::{Command, Output};

use bicons::export::read_obj;
use serde_json::Value;

fn bicons(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicons")).args(args).output().expect("spawn bicons")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn roots_prints_one_third() {
    let out = bicons(&["roots", "--ctilde", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "kappa01 = 0.333333333333"), "{text}");
}

#[test]
fn roots_table_and_intrinsic_constant() {
    let out = bicons(&["roots"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
    let out = bicons(&["roots", "--cminus1", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(&format!("xi01 = {:.12}", 3f64.powf(0.375))), "{text}");
}

#[test]
fn bad_configuration_exits_2() {
    for args in [
        vec!["roots", "--ctilde", "1", "--cminus1", "1"],
        vec!["glue"],
        vec!["profile", "--ctilde", "1", "--grid", "4", "--out", "x.csv"],
        vec!["profile", "--ctilde", "1", "--out", "x.txt"],
        vec!["verify", "--ctilde", "1", "--grid", "10"],
        vec!["mesh", "--ctilde", "1", "--vmax", "-1", "--out", "x.obj"],
        vec!["frobnicate"],
    ] {
        let out = bicons(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_check_exits_1_and_names_it() {
    let out = bicons(&["glue", "--ctilde", "1", "--tol-closure", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("FAILED: closed"));
}

#[test]
fn glue_writes_profile_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = bicons(&["glue", "--ctilde", "-1", "--grid", "50", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("branch,kappa,x,y"));
    assert_eq!(lines.count(), 99);
    let r = report(&dir.path().join("p.report.json"));
    for key in ["params", "suites", "artifacts", "version"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    assert_eq!(r["version"], bicons::VERSION);
    for (name, s) in r["suites"].as_object().unwrap() {
        assert_eq!(s["pass"], true, "{name}");
    }
}

#[test]
fn svg_profile_has_both_branches() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let out = bicons(&["profile", "--ctilde", "1", "--grid", "40", "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("branch1") && text.contains("branch2"));
}

#[test]
fn mesh_is_deterministic_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.obj");
    let b = dir.path().join("b.obj");
    for p in [&a, &b] {
        let out = bicons(&["mesh", "--cminus1", "0.5", "--grid", "24", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let mesh = read_obj(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert!(!mesh.vertices.is_empty() && !mesh.faces.is_empty());
    let r = report(&dir.path().join("a.report.json"));
    assert_eq!(r["suites"]["watertight_seam"]["pass"], true);
    assert_eq!(r["suites"]["watertight_seam"]["seam_boundary_edges"], 0);
}

#[test]
fn intrinsic_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    let out = bicons(&["intrinsic", "--cminus1", "-1", "--samples", "2000", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&path);
    assert_eq!(r["suites"]["completeness"]["pass"], true);
    assert_eq!(r["suites"]["codazzi"]["pass"], true);
}
