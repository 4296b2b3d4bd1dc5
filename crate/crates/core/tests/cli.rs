//! End-to-end runs of the `subgap` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_subgap"));
    c.env_remove("GAPS_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn generate(dir: &Path, kind: &str, size: usize, seed: u64) -> Value {
    let d = dir.join(format!("{kind}-{seed}"));
    let o = run(&["generate", "--kind", kind, "--size", &size.to_string(), "--seed", &seed.to_string(), "--out-dir", d.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap()
}

fn file(dir: &Path, kind: &str, seed: u64, name: &str) -> String {
    dir.join(format!("{kind}-{seed}")).join(name).to_str().unwrap().to_string()
}

/// Rotation by `t` in the (e₁, e₃) plane of ℝ⁴ applied to a list of columns.
fn rotate(cols: &[[f64; 4]], t: f64) -> Vec<Vec<f64>> {
    let (s, c) = t.sin_cos();
    cols.iter().map(|v| vec![c * v[0] - s * v[2], v[1], s * v[0] + c * v[2], v[3]]).collect()
}

/// `Y1 = {0}, M = ⟨e₁,e₂⟩, N = ⟨e₂,e₃⟩, Y2 = ⟨e₁,e₂,e₃⟩` and its rotation by `t`.
fn r4_space(t: f64) -> Value {
    let e = |i: usize| {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    };
    let y1: [[f64; 4]; 0] = [];
    let (m, n, y2) = ([e(0), e(1)], [e(1), e(2)], [e(0), e(1), e(2)]);
    json!({
        "dim": 4,
        "subspaces": {
            "Y1": rotate(&y1, 0.0), "M": rotate(&m, 0.0), "N": rotate(&n, 0.0), "Y2": rotate(&y2, 0.0),
            "Y1p": rotate(&y1, t), "Mp": rotate(&m, t), "Np": rotate(&n, t), "Y2p": rotate(&y2, t),
        }
    })
}

#[test]
fn gap_of_a_subspace_with_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let space = write(dir.path(), "space.json", &r4_space(0.0));
    let o = run(&["gap", "--space", &space, "--m", "M", "--n", "M"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["delta_mn"]["hi"], 0.0);
    assert_eq!(v["delta_hat"]["hi"], 0.0);
}

#[test]
fn report_goes_to_out_file() {
    let dir = TempDir::new().unwrap();
    let space = write(dir.path(), "space.json", &r4_space(0.0));
    let out = dir.path().join("report.json");
    let o = run(&["gap", "--space", &space, "--m", "M", "--n", "N", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    // M and N share one direction and are otherwise orthogonal.
    assert!((v["delta_mn"]["lo"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn rotated_tetrad_passes_verification() {
    let dir = TempDir::new().unwrap();
    let space = write(dir.path(), "space.json", &r4_space(1e-4));
    let o = run(&["tetrad", "verify", "--space", &space, "--tetrad", "Y1,M,N,Y2", "--perturbed", "Y1p,Mp,Np,Y2p", "--variant", "1.2c"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["hypothesis_ok"], true);
    assert_eq!(v["conclusion_ok"], true);
}

#[test]
fn tetrad_index_of_the_r4_example() {
    let dir = TempDir::new().unwrap();
    let space = write(dir.path(), "space.json", &r4_space(0.0));
    let o = run(&["tetrad", "index", "--space", &space, "--tetrad", "Y1,M,N,Y2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["dim_cap"], 1);
    assert_eq!(v["dim_sum"], 3);
    assert_eq!(v["index"], 1);
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("space.json");
    std::fs::write(&p, "{ \"dim\": 4, \"subspaces\": ").unwrap();
    let o = run(&["gap", "--space", p.to_str().unwrap(), "--m", "M", "--n", "N"]);
    assert_eq!(code(&o), 3);
    assert!(!o.stderr.is_empty());
}

#[test]
fn missing_subspace_and_bad_variant_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let space = write(dir.path(), "space.json", &r4_space(0.0));
    assert_eq!(code(&run(&["gap", "--space", &space, "--m", "M", "--n", "Z"])), 3);
    let o = run(&["tetrad", "verify", "--space", &space, "--tetrad", "Y1,M,N,Y2", "--perturbed", "Y1p,Mp,Np,Y2p", "--variant", "9.9z"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(code(&run(&["frobnicate"])), 3);
    assert_eq!(code(&run(&[])), 3);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn generate_is_deterministic_and_honours_the_seed_variable() {
    let a = run(&["generate", "--kind", "tetrad", "--size", "5", "--seed", "11"]);
    let b = run(&["generate", "--kind", "tetrad", "--size", "5", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["generate", "--kind", "tetrad", "--size", "5", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
    let env = bin().args(["generate", "--kind", "tetrad", "--size", "5", "--seed", "12"]).env("GAPS_SEED", "11").output().unwrap();
    assert_eq!(env.stdout, a.stdout);
    let bad = bin().args(["generate", "--kind", "tetrad", "--size", "5"]).env("GAPS_SEED", "eleven").output().unwrap();
    assert_eq!(code(&bad), 3);
}

#[test]
fn generated_instances_match_their_manifests() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for seed in 0..6u64 {
        let size = 3 + (seed as usize % 4);

        let m = generate(d, "tetrad", size, seed);
        let o = run(&["tetrad", "index", "--space", &file(d, "tetrad", seed, "space.json"), "--tetrad", "Y1,M,N,Y2"]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout_json(&o)["index"], m["truth"]["index"], "tetrad seed {seed}");

        let m = generate(d, "reldim", size, seed);
        let space = file(d, "reldim", seed, "space.json");
        let o = run(&["reldim", "--space", &space, "--m", "M", "--n", "N", "--k", &file(d, "reldim", seed, "k.json")]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout_json(&o)["value"], m["truth"]["relative_dim"], "reldim seed {seed}");

        let m = generate(d, "morse", size, seed);
        let (space, q, r) = (file(d, "morse", seed, "space.json"), file(d, "morse", seed, "q.json"), file(d, "morse", seed, "r.json"));
        let o = run(&["morse", "indices", "--space", &space, "--q", &q]);
        assert_eq!(code(&o), 0);
        let idx = &stdout_json(&o)["indices"];
        for key in ["m_plus", "m_minus", "m_zero"] {
            assert_eq!(idx[key], m["truth"][key], "morse seed {seed} {key}");
        }
        for variant in ["thm1.6", "prop1.7", "prop-definite"] {
            let o = run(&["morse", "certify", "--space", &space, "--q", &q, "--r", &r, "--c", "1", "--variant", variant, "--budget", "200"]);
            assert_ne!(code(&o), 2, "morse {variant} seed {seed}: {}", String::from_utf8_lossy(&o.stdout));
        }

        generate(d, "path", size, seed);
        let o = run(&["family", "--path", &file(d, "path", seed, "path.json")]);
        assert_ne!(code(&o), 2, "path seed {seed}");
        assert_eq!(stdout_json(&o)["constant"], true);
    }
}
