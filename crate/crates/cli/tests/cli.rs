use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_heunmcv");

fn theta() -> Value {
    json!({"theta0": [0.3, 0.1], "theta1": [-0.2, 0.05], "thetat": [0.15, -0.2], "thetainf": [0.6, 0.1]})
}

fn state() -> Value {
    json!({"t": [2.3, 0.2], "lambda": [1.4, 0.5], "mu": [0.4, -0.3], "k": [1.1, 0.2]})
}

fn run_in(dir: &Path, cmd: &str, job: &Value, extra: &[&str]) -> (Output, Option<Value>) {
    let input = dir.join(format!("{cmd}.json"));
    std::fs::write(&input, job.to_string()).unwrap();
    let out = Command::new(BIN).arg(cmd).arg("--in").arg(&input).args(extra).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).ok();
    (out, v)
}

fn run(cmd: &str, job: &Value, extra: &[&str]) -> (i32, Option<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run_in(dir.path(), cmd, job, extra);
    (out.status.code().unwrap(), v)
}

fn re(v: &Value) -> f64 {
    v[0].as_f64().unwrap()
}

fn im(v: &Value) -> f64 {
    v[1].as_f64().unwrap()
}

#[test]
fn params_reports_kappas() {
    let job = json!({"theta": {"theta0": [1, 0], "theta1": [1, 0], "thetat": [1, 0], "thetainf": [1, 0]}});
    let (code, v) = run("params", &job, &[]);
    assert_eq!(code, 0);
    let v = v.unwrap();
    assert_eq!(v["kappa1"], json!([-1.0, 0.0]));
    assert_eq!(v["kappa2"], json!([-2.0, 0.0]));
    assert!(v["residuals"].is_object());
}

#[test]
fn params_applies_words() {
    let job = json!({"theta": theta(), "state": state(), "word": [0, 3, 4, 2, 0, 3, 4]});
    let (_, word) = run("params", &job, &[]);
    let (_, mcv) = run("mcv", &json!({"theta": theta(), "state": state()}), &[]);
    let (word, mcv) = (word.unwrap(), mcv.unwrap());
    for (a, b) in [(&word["word_image"]["lambda"], &mcv["lambda_tilde"]), (&word["word_image"]["mu"], &mcv["mu_tilde"])]
    {
        assert!((re(a) - re(b)).abs() < 1e-10 && (im(a) - im(b)).abs() < 1e-10);
    }
}

#[test]
fn mcv_example_values() {
    let job = json!({
        "theta": {"theta0": [0, 0], "theta1": [0, 0], "thetat": [0, 0], "thetainf": [2, 0]},
        "state": {"t": [2, 0], "lambda": [0.5, 0], "mu": [1, 0]},
    });
    let (code, v) = run("mcv", &job, &[]);
    assert_eq!(code, 0);
    let v = v.unwrap();
    assert!((re(&v["lambda_tilde"]) - 1.5).abs() < 1e-12);
    assert!((re(&v["mu_tilde"]) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn mcv_conjugate_check_passes() {
    let job = json!({"theta": theta(), "state": state(), "check_conjugate": true});
    let (code, v) = run("mcv", &job, &[]);
    assert_eq!(code, 0);
    let r = &v.unwrap()["residuals"];
    for k in ["displayed_conjugate", "block_vs_build", "det_s"] {
        assert!(r[k].as_f64().unwrap() < 1e-8, "{k}: {}", r[k]);
    }
}

#[test]
fn build_then_reduce_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let z = json!([[0.3, 0.4], [-0.7, 1.1]]);
    let (out, built) = run_in(dir.path(), "build", &json!({"theta": theta(), "state": state()}), &[]);
    assert_eq!(out.status.code(), Some(0));
    let system = built.unwrap()["system"].clone();
    let (_, via) = run_in(dir.path(), "reduce", &json!({"system": system, "z": z}), &[]);
    let (_, direct) = run_in(dir.path(), "reduce", &json!({"theta": theta(), "state": state(), "z": z}), &[]);
    let (via, direct) = (via.unwrap(), direct.unwrap());
    for (a, b) in via["values"].as_array().unwrap().iter().zip(direct["values"].as_array().unwrap()) {
        for k in ["p1", "p2"] {
            let d = (re(&a[k]) - re(&b[k])).hypot(im(&a[k]) - im(&b[k]));
            assert!(d <= 1e-12 * (1.0 + re(&b[k]).hypot(im(&b[k]))), "{k}: {d}");
        }
    }
}

#[test]
fn restrict_every_line() {
    for line in ["L0", "L1", "Lt", "Linf", "L0s", "L1s", "Lts", "Linfs"] {
        let job = json!({"theta": theta(), "t": [2.3, 0.2], "line": line, "coord": [0.3, 0.2]});
        let (code, v) = run("restrict", &job, &[]);
        assert_eq!(code, 0, "{line}");
        let v = v.unwrap();
        assert_eq!(v["line"], json!(line));
        assert_eq!(v["realization"].get("not_realizable").is_some(), line == "Linfs");
    }
}

#[test]
fn monodromy_matches_exponents() {
    let job = json!({"theta": theta(), "state": state(), "loops": ["0", "1", "t", "inf"]});
    let (code, v) = run("monodromy", &job, &[]);
    assert_eq!(code, 0);
    let v = v.unwrap();
    assert_eq!(v["loops"].as_array().unwrap().len(), 4);
    assert!(v["residuals"]["exponents"].as_f64().unwrap() < 1e-7);
    assert!(v["residuals"]["loop_relation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_integral_seeded() {
    let job = json!({"theorem": "system-kappa2"});
    let (code, v) = run("verify-integral", &job, &["--seed", "7"]);
    assert_eq!(code, 0);
    let v = v.unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-6);
    for k in ["theorem", "parameters", "max_residual", "samples", "elapsed", "residuals"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    // deterministic apart from timing
    let (_, w) = run("verify-integral", &job, &["--seed", "7"]);
    assert_eq!(v["parameters"], w.unwrap()["parameters"]);
}

#[test]
fn verification_failure_exits_2() {
    let (code, v) = run("build", &json!({"theta": theta(), "state": state()}), &["--tol", "1e-300"]);
    assert_eq!(code, 2);
    assert!(v.unwrap()["residuals"]["construction"].is_number());
}

#[test]
fn input_errors_exit_1() {
    assert_eq!(run("params", &json!({"thetas": 1}), &[]).0, 1);
    assert_eq!(run("verify-integral", &json!({"theorem": "system-kappa2"}), &[]).0, 1);
    assert_eq!(run("verify-integral", &json!({"theorem": "no-such-theorem", "seed": 1}), &[]).0, 1);
    assert_eq!(run("params", &json!({"command": "build", "theta": theta()}), &[]).0, 1);
    assert_eq!(
        run("build", &json!({"theta": theta(), "state": {"t": [1, 0], "lambda": [0.5, 0], "mu": [1, 0]}}), &[]).0,
        1
    );
    let bad_complex = json!({"theta": {"theta0": 1, "theta1": [0, 0], "thetat": [0, 0], "thetainf": [1, 0]}});
    assert_eq!(run("params", &bad_complex, &[]).0, 1);
}

#[test]
fn reads_standard_input_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut child =
        Command::new(BIN).args(["params", "--in", "-", "--out"]).arg(&out).stdin(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(json!({"theta": theta()}).to_string().as_bytes()).unwrap();
    assert!(child.wait().unwrap().success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["command"], json!("params"));
}

#[test]
fn schema_covers_job_fields() {
    let text = include_str!("../schema/job.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    let props = schema["properties"].as_object().unwrap();
    for k in [
        "command",
        "theta",
        "state",
        "system",
        "word",
        "t",
        "k",
        "line",
        "coord",
        "z",
        "check_conjugate",
        "theorem",
        "seed",
        "draws",
        "samples",
        "points",
        "loops",
        "base",
        "z_radius",
        "tol",
    ] {
        assert!(props.contains_key(k), "{k}");
    }
    assert_eq!(schema["additionalProperties"], json!(false));
}
