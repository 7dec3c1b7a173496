use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn helixforms(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_helixforms"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("HELIXFORMS_THREADS", n),
        None => cmd.env_remove("HELIXFORMS_THREADS"),
    };
    cmd.output().expect("binary runs")
}

/// Runs with `--report` and returns `(exit code, report, stderr)`.
fn run(args: &[&str]) -> (i32, Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut all = args.to_vec();
    all.extend(["--report", out.to_str().unwrap()]);
    let o = helixforms(&all, None);
    let stderr = String::from_utf8_lossy(&o.stderr).into_owned();
    let text = std::fs::read_to_string(&out).unwrap_or_else(|_| panic!("no report; stderr: {stderr}"));
    (o.status.code().unwrap(), serde_json::from_str(&text).unwrap(), stderr)
}

fn fails(args: &[&str]) -> (i32, String) {
    let o = helixforms(args, None);
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn checks<'a>(r: &'a Value, prefix: &str) -> Vec<&'a Value> {
    r["checks"].as_array().unwrap().iter().filter(|c| c["name"].as_str().unwrap().starts_with(prefix)).collect()
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("s.toml");
    std::fs::write(&p, text).unwrap();
    p
}

const ANNULUS: &str = r#"
schema_version = 1
name = "t"
omega = "1"
H = "(4-x^2-y^2)/3"

[domain]
outer = { center = [0.0, 0.0], radius = 2.0 }
holes = [{ center = [0.0, 0.0], radius = 1.0 }]
"#;

#[test]
fn invariants_of_annulus_basic_match_closed_forms() {
    let s = scenario("annulus-basic.toml");
    let (code, r, _) = run(&["invariants", s.to_str().unwrap(), "--level", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "PASS");
    assert_eq!(r["quadrature"]["level"], 3);
    let v = &r["values"];
    let flux: Vec<f64> = v["flux"]["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(rel(flux[0], 3.0 * PI) < 1e-6);
    assert!(rel(flux[1], -1.0) < 1e-12);
    assert!(rel(v["helicity"]["value"].as_f64().unwrap(), -3.0 * PI) < 1e-6);
    assert!(rel(v["calabi"]["value"].as_f64().unwrap(), 1.5 * PI) < 1e-6);
    // Each value lies within a small multiple of its own error bar.
    let h_err = v["helicity"]["error_estimate"].as_f64().unwrap();
    assert!((v["helicity"]["value"].as_f64().unwrap() + 3.0 * PI).abs() <= h_err.max(1e-12));
    assert_eq!(checks(&r, "").len(), 4);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let s = scenario("two-hole.toml");
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for n in ["1", "3"] {
        let out = dir.path().join(format!("r{n}.json"));
        let args = ["invariants", s.to_str().unwrap(), "--level", "2", "--matrix", "--report", out.to_str().unwrap()];
        assert_eq!(helixforms(&args, Some(n)).status.code(), Some(0));
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn zero_hamiltonian_has_zero_helicity_and_calabi() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &ANNULUS.replace("\"(4-x^2-y^2)/3\"", "\"0\""));
    let (code, r, _) = run(&["invariants", p.to_str().unwrap(), "--level", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["values"]["helicity"]["value"].as_f64().unwrap(), 0.0);
    assert_eq!(r["values"]["calabi"]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn diffeomorphism_invariance_is_flagged() {
    let s = scenario("annulus-sheared.toml");
    let (code, r, _) = run(&["invariants", s.to_str().unwrap(), "--level", "2"]);
    assert_eq!(code, 0);
    let inv = checks(&r, "");
    assert_eq!(inv.len(), 3);
    assert!(inv.iter().all(|c| c["status"] == "PASS" && c["name"].as_str().unwrap().contains("invariant under shear")));
}

#[test]
fn gauge_override() {
    let s = scenario("annulus-basic.toml");
    let (_, r, _) = run(&["invariants", s.to_str().unwrap(), "--level", "2", "--gauge", "2,1"]);
    assert_eq!(r["values"]["helicity"]["gauge"], serde_json::json!([2, 1]));
    let (code, err) = fails(&["invariants", s.to_str().unwrap(), "--level", "1", "--gauge", "3,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("out of range"), "{err}");
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(dir.path(), &ANNULUS.replace("\"(4-x^2-y^2)/3\"", "\"x\""));
    let (code, err) = fails(&["invariants", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("S_2") || err.contains("S_1"), "{err}");

    let p = write_scenario(dir.path(), &ANNULUS.replace("omega = \"1\"\n", ""));
    let (code, err) = fails(&["invariants", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("omega"), "{err}");

    let (code, _) = fails(&["invariants", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code, 2);

    let s = scenario("annulus-basic.toml");
    let (code, _) = fails(&["verify", s.to_str().unwrap(), "--suite", "nonsense"]);
    assert_eq!(code, 2);

    let o = helixforms(&["invariants", s.to_str().unwrap(), "--level", "1"], Some("zero"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_violation_names_s2() {
    let dir = tempfile::tempdir().unwrap();
    // Vanishes on the outer circle, varies along the inner one.
    let p = write_scenario(dir.path(), &ANNULUS.replace("\"(4-x^2-y^2)/3\"", "\"(4-x^2-y^2)*x\""));
    let (code, err) = fails(&["invariants", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("S_2"), "{err}");
}

#[test]
fn identities_suite_reports_literal_and_corrected_forms() {
    let s = scenario("two-hole.toml");
    let (code, r, _) = run(&["verify", s.to_str().unwrap(), "--suite", "identities", "--level", "2"]);
    // The identity as literally stated fails by sign; the half-difference
    // form holds.
    assert_eq!(code, 1);
    let literal = checks(&r, "identities (");
    assert_eq!(literal.len(), 6 * 4);
    for c in literal {
        let name = c["name"].as_str().unwrap();
        if name.ends_with("(H_ll - H_kk)/2 = Flux[M x 0] Flux[Pi_lk]") {
            assert_eq!(c["status"], "PASS", "{name}");
        } else if c["status"] != "INFO" {
            assert_eq!(c["status"], "FAIL", "{name}");
            assert!((c["error"].as_f64().unwrap() - 2.0).abs() < 1e-3);
        } else {
            assert!(c["measured"].as_f64().unwrap() < 1e-4);
        }
    }
    assert_eq!(checks(&r, "identities: H_11 = -2 Cal")[0]["status"], "PASS");
}

#[test]
fn gauge_shift_and_lemma2_suites_pass() {
    let s = scenario("two-hole.toml");
    let (code, r, _) = run(&["verify", s.to_str().unwrap(), "--suite", "gauge-shift", "--level", "3"]);
    assert_eq!(code, 0, "{r}");
    let s = scenario("annulus-basic.toml");
    let (code, r, _) = run(&["verify", s.to_str().unwrap(), "--suite", "lemma2", "--level", "1"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(checks(&r, "lemma2")[0]["status"], "PASS");
    // The sheared field is time-dependent, so its shear is no stabilizer.
    let s = scenario("annulus-sheared.toml");
    let (code, r, _) = run(&["verify", s.to_str().unwrap(), "--suite", "lemma2", "--level", "1"]);
    assert_eq!(code, 0);
    assert_eq!(checks(&r, "lemma2")[0]["status"], "SKIP");
}

#[test]
fn path_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    for (scn, lemma) in [("annulus-basic.toml", "1a"), ("annulus-sheared.toml", "1b")] {
        let csv = dir.path().join(format!("{lemma}.csv"));
        let s = scenario(scn);
        let (code, r, _) = run(&[
            "path-check",
            s.to_str().unwrap(),
            "--lemma",
            lemma,
            "--samples",
            "5",
            "--level",
            "2",
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{r}");
        let text = std::fs::read_to_string(&csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "u,helicity,rel_deviation,unpulled_helicity");
        assert!(lines[5].starts_with("1,"));
        let c = r["values"]["path"]["c"].as_f64().unwrap();
        for row in r["values"]["path"]["samples"].as_array().unwrap() {
            assert!(rel(row["helicity"].as_f64().unwrap(), c) < 1e-8);
        }
    }
    let dir2 = tempfile::tempdir().unwrap();
    let p = write_scenario(dir2.path(), ANNULUS);
    let (code, err) = fails(&["path-check", p.to_str().unwrap(), "--lemma", "1a"]);
    assert_eq!(code, 2);
    assert!(err.contains("[paths]"), "{err}");
}

#[test]
fn derivative_command() {
    let s = scenario("annulus-basic.toml");
    let base = ["derivative", s.to_str().unwrap(), "--probes", "3", "--level", "1"];
    // The helicity density comes out as 2B, so the literal λ̂ = 1 check fails.
    let (code, r, _) = run(&[&base[..], &["--functional", "helicity"]].concat());
    assert_eq!(code, 1);
    let lambda = r["values"]["fit"]["lambda"].as_f64().unwrap();
    assert!((lambda - 2.0).abs() < 1e-2, "{lambda}");
    assert_eq!(r["values"]["fit"]["probes"].as_array().unwrap().len(), 3);

    let (code, r, _) = run(&[&base[..], &["--functional", "flux:1"]].concat());
    assert_eq!(code, 0, "{r}");

    let (code, _) = fails(&[&base[..], &["--functional", "flux:x"]].concat());
    assert_eq!(code, 2);
    let (code, _) = fails(&["derivative", s.to_str().unwrap(), "--functional", "helicity", "--probes", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn stdout_report_without_file() {
    let s = scenario("annulus-basic.toml");
    let o = helixforms(&["invariants", s.to_str().unwrap(), "--level", "1"], None);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tool"], "helixforms");
    assert_eq!(r["scenario"]["name"], "annulus-basic");
}
