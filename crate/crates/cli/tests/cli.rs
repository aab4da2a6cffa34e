use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgp"))
        .args(args)
        .env_remove("HGP_CAPS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hgp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hgp(&["bogus"]).status.code(), Some(2));
    assert_eq!(hgp(&["graph", "gen"]).status.code(), Some(2));
    assert_eq!(
        hgp(&["solve", "pricing", "--input", "x", "--algo", "magic"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_on_two_consumers() {
    let out = hgp(&[
        "solve",
        "pricing",
        "--algo",
        "oracle",
        "--input",
        &fixture("two_consumers.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["revenue"], "4");
    assert_eq!(v["result"]["prices"]["prices"][0], "2");
    assert_eq!(v["command"], "solve pricing");
    assert_eq!(v["seed"], 0);
    assert!(v["caps"]["smp_oracle_items"].is_u64());
    assert_eq!(v["versions"]["hgp-core"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn refusal_exits_3_and_names_the_bound() {
    let g = scratch("big.json");
    let gen = hgp(&[
        "graph",
        "gen",
        "--kind",
        "general",
        "--n",
        "30",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = hgp(&["graph", "mis", "--input", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap is 24"), "{err}");
}

#[test]
fn cap_overrides_come_from_the_environment() {
    let g = scratch("mid.json");
    hgp(&[
        "graph",
        "gen",
        "--kind",
        "general",
        "--n",
        "12",
        "--out",
        g.to_str().unwrap(),
    ]);
    let out = Command::new(env!("CARGO_BIN_EXE_hgp"))
        .args(["graph", "mis", "--input", g.to_str().unwrap()])
        .env("HGP_CAPS", "mis_vertices=10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        hgp(&["graph", "mis", "--input", g.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn out_file_matches_stdout() {
    let path = scratch("csp.json");
    let args = ["--seed", "5", "csp", "gen", "--vars", "4", "--clauses", "3"];
    let streamed = hgp(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let written = hgp(&with_out);
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), streamed.stdout);
    let other = hgp(&["--seed", "6", "csp", "gen", "--vars", "4", "--clauses", "3"]);
    assert_ne!(other.stdout, streamed.stdout);
}

#[test]
fn pipeline_runs_end_to_end() {
    let csp = scratch("balanced.json");
    let gen = hgp(&[
        "--seed",
        "3",
        "csp",
        "gen",
        "--vars",
        "3",
        "--clauses",
        "2",
        "--arity",
        "2",
        "--balanced",
        "--out",
        csp.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = hgp(&[
        "--seed",
        "3",
        "pipeline",
        "run",
        "--csp",
        csp.to_str().unwrap(),
        "--d",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["result"]["extraction"]["valid"], true);
    let again = hgp(&[
        "--seed",
        "3",
        "pipeline",
        "run",
        "--csp",
        csp.to_str().unwrap(),
        "--d",
        "2",
    ]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn reduce_writes_instance_and_provenance() {
    let g = scratch("bip.json");
    let inst = scratch("inst.json");
    let prov = scratch("prov.json");
    hgp(&[
        "graph",
        "gen",
        "--n",
        "5",
        "--max-degree",
        "3",
        "--p",
        "0.5",
        "--out",
        g.to_str().unwrap(),
    ]);
    let out = hgp(&[
        "reduce",
        "matching-to-pricing",
        "--d",
        "3",
        "--rule",
        "smp",
        "--input",
        g.to_str().unwrap(),
        "--out",
        inst.to_str().unwrap(),
        "--provenance",
        prov.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let solved = hgp(&["solve", "pricing", "--input", inst.to_str().unwrap()]);
    assert_eq!(
        solved.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&solved.stderr)
    );
    let v = json(&solved);
    assert_eq!(v["result"]["rule"], "smp");
    let p: Value = serde_json::from_slice(&std::fs::read(&prov).unwrap()).unwrap();
    assert_eq!(p["result"]["d"], 3);
}

#[test]
fn quick_suite_passes() {
    let out = hgp(&["verify", "all", "--scale", "quick", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["result"]["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}
