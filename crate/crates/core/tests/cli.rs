use std::path::Path;
use std::process::{Command, Output};

use gcp_lift::cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn bin(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gcp-lift"));
    cmd.args(args);
    if let Some(p) = config {
        cmd.arg("--config").arg(p);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("gcp-lift").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn default_check_passes() {
    let o = bin(&["check"], None);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["instance"], "flat-torus");
    assert_eq!(v["failed"], 0);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "PASS"));
    for name in ["clifford.relations", "gcp.inner_left", "lift.selfadjoint", "lift.kucerovsky_stability"] {
        assert!(checks.iter().any(|c| c["name"] == name), "{name} missing");
    }
}

#[test]
fn broken_connexion_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "broken.toml", "instance = \"flat-torus\"\nconnexion = \"perturbed\"\n");
    let o = bin(&["check"], Some(&cfg));
    assert_eq!(o.status.code(), Some(EXIT_FAIL));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let herm = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "connexion.right_hermitian").unwrap();
    assert_eq!(herm["status"], "FAIL");
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "ladder = \"\"\n");
    assert_eq!(bin(&["check"], Some(&empty)).status.code(), Some(EXIT_USAGE));
    let unknown = write(dir.path(), "unknown.toml", "instance = \"sphere\"\n");
    assert_eq!(bin(&["check"], Some(&unknown)).status.code(), Some(EXIT_USAGE));
    let bad = write(dir.path(), "bad.toml", "instance = 3\n");
    assert_eq!(bin(&["check"], Some(&bad)).status.code(), Some(EXIT_USAGE));
    assert_eq!(bin(&["check"], Some(&dir.path().join("missing.toml"))).status.code(), Some(EXIT_USAGE));
    assert_eq!(bin(&["frobnicate"], None).status.code(), Some(EXIT_USAGE));
    assert_eq!(in_process(&["check", "--ladder", "3x4,2x6"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["check", "--tolerance", "-1"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["heat", "--t", "0.5,0"]).0, EXIT_USAGE);
    let (code, _, err) = in_process(&["check", "--ladder", ""]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("ladder"));
    assert_eq!(in_process(&["--help"]).0, EXIT_OK);
}

#[test]
fn spectrum_rows_match_the_closed_form() {
    let (code, out, _) = in_process(&["spectrum"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# instance=flat-torus"));
    assert_eq!(lines.next().unwrap(), "degree,mode,eigenvalue");
    let mut n_rows = 0;
    let mut prev = f64::NEG_INFINITY;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let k: f64 = f[0].parse().unwrap();
        let l: Vec<f64> = f[1].split(';').map(|x| x.parse().unwrap()).collect();
        let v: f64 = f[2].parse().unwrap();
        let want = (k * k + 4.0 * std::f64::consts::PI.powi(2) * l.iter().map(|x| x * x).sum::<f64>()).sqrt();
        assert!((v.abs() - want).abs() < 1e-9, "{line}");
        assert!(v >= prev);
        prev = v;
        n_rows += 1;
    }
    // K = 2, M = 4, two spinor components
    assert_eq!(n_rows, 5 * 81 * 2);
}

#[test]
fn heat_traces_decrease_and_match_direct_sums() {
    let (code, out, _) = in_process(&["heat", "--t", "0.05,0.2,1,40"]);
    assert_eq!(code, EXIT_OK);
    let traces: Vec<f64> = out.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(traces.windows(2).all(|w| w[1] < w[0]));
    // at t = 1 only |l| = 0 survives appreciably: sum over degrees of 2 e^{-k^2}
    let mut direct = 0.0;
    for k in -2i64..=2 {
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let lam2 = (k * k) as f64 + 4.0 * std::f64::consts::PI.powi(2) * ((a * a + b * b) as f64);
                direct += 2.0 * (-lam2).exp();
            }
        }
    }
    assert!((traces[2] - direct).abs() < 1e-9);
    // the kernel: only the two spinor states of degree 0, mode 0
    assert!((traces[3] - 2.0).abs() < 1e-12);
}

#[test]
fn norm1_is_stable_and_homogeneous() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "a.toml", "[[norm1.terms]]\nmode = [1, 0]\nre = 1.0\n");
    let two = write(dir.path(), "b.toml", "[[norm1.terms]]\nmode = [1, 0]\nre = 2.0\n");
    let read = |p: &Path| -> serde_json::Value { serde_json::from_slice(&bin(&["norm1"], Some(p)).stdout).unwrap() };
    let (a, b) = (read(&one), read(&two));
    assert_eq!(a["status"], "PASS");
    let na = a["rungs"][0]["norm"].as_f64().unwrap();
    let nb = b["rungs"][0]["norm"].as_f64().unwrap();
    assert!((nb - 2.0 * na).abs() < 1e-12);
    let unit = write(dir.path(), "u.toml", "[[norm1.terms]]\nmode = [0, 0]\nre = 1.0\n");
    let u = read(&unit);
    assert!(u["rungs"].as_array().unwrap().iter().all(|r| (r["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn out_dir_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("reports");
    let (code, out, _) = in_process(&["check", "--out", target.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let body = std::fs::read_to_string(target.join("check.json")).unwrap();
    assert!(body.contains("\"seed\": 4"));
    let (_, again, _) = in_process(&["check", "--seed", "4"]);
    assert_eq!(again, body);
}

#[test]
fn qhm_reduction_matches_flat_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    // mu = nu = 0, c = 0: the grid model collapses to the commutative torus
    let q = write(
        dir.path(),
        "q.toml",
        "instance = \"qhm\"\n[params.qhm]\nmu_num = 0\nmu_den = 1\nnu_num = 0\nnu_den = 1\n",
    );
    let qhm = String::from_utf8(bin(&["spectrum"], Some(&q)).stdout).unwrap();
    let flat = String::from_utf8(bin(&["spectrum"], None).stdout).unwrap();
    let values = |s: &str| -> Vec<String> { s.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().to_string()).collect() };
    assert!(!qhm.is_empty());
    assert_eq!(values(&qhm), values(&flat));
}

#[test]
fn qhm_with_flux_runs_grid_checks_only() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "q.toml", "instance = \"qhm\"\n[params.qhm]\nc = 1\n");
    let o = bin(&["check"], Some(&q));
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"qhm.connexion.convergence_ratio"));
    assert!(!names.contains(&"lift.selfadjoint"));
    assert_eq!(bin(&["spectrum"], Some(&q)).status.code(), Some(EXIT_USAGE));
}
