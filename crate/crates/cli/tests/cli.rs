use std::path::Path;
use std::process::{Command, Output};

fn sgl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgl")).args(args).env_remove("SGL_TOL_OVERRIDE").output().unwrap()
}

fn sgl_env(args: &[&str], tol_file: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgl")).args(args).env("SGL_TOL_OVERRIDE", tol_file).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value of `field` in a header + row CSV.
fn field(csv: &str, field: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == field).unwrap();
    row[i].to_string()
}

fn gen_mesh(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut a = vec!["gen-mesh"];
    a.extend_from_slice(args);
    let p = path.to_str().unwrap().to_string();
    a.extend_from_slice(&["--out", &p]);
    let o = sgl(&a);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

#[test]
fn flat_unit_ball_is_sharp() {
    let o = sgl(&["verify-ball", "--n", "2", "--k", "0", "--R", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let slack: f64 = field(&out, "relative_slack").parse().unwrap();
    assert!(slack.abs() < 1e-6);
    let l1: f64 = field(&out, "lambda1").parse().unwrap();
    assert!((l1 - 5.783185962946785).abs() < 1e-8 * l1);
    assert!(stderr(&o).contains("lambda2"));
}

#[test]
fn spherical_ball_is_sharp() {
    let o = sgl(&["verify-ball", "--n", "2", "--k", "1", "--R", "0.6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn hemisphere_cap_is_ineligible() {
    let o = sgl(&["verify-ball", "--n", "2", "--k", "1", "--R", "2.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ineligible"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(sgl(&["verify-ball", "--n", "2", "--k", "0"]).status.code(), Some(2));
    assert_eq!(sgl(&["verify-ball", "--n", "2", "--k", "0", "--R", "-1"]).status.code(), Some(2));
    assert_eq!(sgl(&["verify-ball", "--n", "0", "--k", "0", "--R", "1"]).status.code(), Some(2));
}

#[test]
fn square_mesh_holds_and_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = gen_mesh(dir.path(), "square.mesh", &["square", "cells=24"]);
    let out = dir.path().join("row.csv");
    let o = sgl(&["verify-domain", "--mesh", &mesh, "--alpha", "1", "--K", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "verdict"), "holds");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);

    let o = sgl(&["verify-domain", "--mesh", &mesh, "--K", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"verdict\": \"holds\""));
}

#[test]
fn disk_mesh_is_nearly_sharp() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = gen_mesh(dir.path(), "disk.mesh", &["disk", "radius=1", "level=4"]);
    let o = sgl(&["verify-domain", "--mesh", &mesh, "--alpha", "1", "--K", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let slack: f64 = field(&stdout(&o), "relative_slack").parse().unwrap();
    assert!(slack.abs() < 0.02, "slack {slack}");
}

#[test]
fn verdict_margin_comes_from_the_override_file() {
    let dir = tempfile::tempdir().unwrap();
    // The coarse disk overestimates λ₂ more than λ₁ and lands about 2% above
    // the (sharp) bound.
    let mesh = gen_mesh(dir.path(), "disk.mesh", &["disk", "radius=1", "level=3"]);
    let args = ["verify-domain", "--mesh", mesh.as_str(), "--K", "0"];
    let o = sgl(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "verdict"), "violated");

    let tol = dir.path().join("tol.cfg");
    std::fs::write(&tol, "verdict_margin = 0.05\n").unwrap();
    let o = sgl_env(&args, &tol);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    std::fs::write(&tol, "no_such_tolerance = 1\n").unwrap();
    assert_eq!(sgl_env(&args, &tol).status.code(), Some(2));
}

#[test]
fn malformed_mesh_header_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("a.mesh", "MESH 1 flat 0\n3 1\n"), ("b.mesh", "SGLMESH 1 nowhere 0\n"), ("c.mesh", "")] {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let o = sgl(&["verify-domain", "--mesh", p.to_str().unwrap(), "--K", "0"]);
        assert_eq!(o.status.code(), Some(2));
        let err = stderr(&o);
        assert!(err.contains("SGLMESH") && err.contains("line 1"), "{err}");
    }
    let o = sgl(&["verify-domain", "--mesh", "/nonexistent/x.mesh", "--K", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn curvature_outside_declared_bounds_is_ineligible() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = gen_mesh(dir.path(), "pent.mesh", &["hyperbolic-polygon", "level=2"]);
    let o = sgl(&["verify-domain", "--mesh", &mesh, "--K", "-0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("curvature witness"));
}

#[test]
fn empty_corpus_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    std::fs::write(&cfg, "# nothing here\n").unwrap();
    let o = sgl(&["corpus", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stderr(&o).contains("holds=0 violated=0 ineligible=0 errors=0"));
}

const SMALL: &str = "\
id = square
source = square
cells = 16
K = 0

id = disk
source = mesh:disk.mesh
K = 0
k_upper = 0

id = warped
source = warped-disk
a = 0.1
radius = 1
K = -0.6
k_upper = 0

id = misdeclared
source = warped-disk
a = 0.1
radius = 1
K = -0.2
k_upper = 0
expected = violated
";

#[test]
fn corpus_is_deterministic_and_flags_witness_failures() {
    let dir = tempfile::tempdir().unwrap();
    gen_mesh(dir.path(), "disk.mesh", &["disk", "level=4"]);
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, SMALL).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = sgl(&["corpus", "--config", cfg, "--jobs", "1"]);
    let b = sgl(&["corpus", "--config", cfg, "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["disk", "misdeclared", "square", "warped"]);
    let mis = csv.lines().find(|l| l.starts_with("misdeclared")).unwrap();
    assert!(mis.contains(",ineligible,"));
    assert!(stderr(&a).contains("curvature witness failed"));

    // Without the expectation the same entry makes the run fail.
    let cfg2 = dir.path().join("strict.cfg");
    std::fs::write(&cfg2, SMALL.replace("expected = violated\n", "")).unwrap();
    let o = sgl(&["corpus", "--config", cfg2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_corpus_holds() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/default.cfg");
    let o = sgl(&["corpus", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("holds=6 violated=0 ineligible=0 errors=0 unexpected=0"), "{}", stderr(&o));
}
