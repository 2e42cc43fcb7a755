use std::process::Command;

use cpn_certify::report::{recheck, without_timings};
use cpn_certify::{run_args, Outcome, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> Outcome {
    run_args(std::iter::once("cpn-certify").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.report).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("cpn-certify-{}-{name}", std::process::id()))
}

#[test]
fn geometry_records_scalar_curvature() {
    for (n, r) in [("1", 8.0), ("2", 24.0)] {
        let o = run(&["geometry", "--N", n, "--points", "100", "--seed", "7"]);
        assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
        assert_eq!(json(&o)["values"]["R"].as_f64().unwrap(), r);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["geometry", "--N", "0"]).code, EXIT_USAGE);
    assert_eq!(run(&["moments", "--N", "2", "--mc-samples", "100"]).code, EXIT_USAGE);
    assert_eq!(run(&["geometry", "--bogus"]).code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["algebra", "--n", "zero"]).code, EXIT_USAGE);
    assert_eq!(run(&["variation", "--mutate", "100000"]).code, EXIT_USAGE);
    assert_eq!(run(&["eigen", "--config", "/nonexistent/cpn.conf"]).code, EXIT_USAGE);
    let o = run(&["geometry", "--N", "0"]);
    assert!(o.report.is_empty());
    assert!(o.messages[0].contains("N must be at least 1"));
}

#[test]
fn small_n_fails_with_reason() {
    for verb in ["certify", "moments"] {
        let o = run(&[verb, "--N", "1"]);
        assert_eq!(o.code, EXIT_FAIL);
        assert!(
            o.messages.iter().any(|m| m.contains("requires N >= 2")),
            "{:?}",
            o.messages
        );
        assert_eq!(json(&o)["status"], "fail");
    }
}

#[test]
fn eigen_dimensions() {
    for (n, d) in [("2", 8), ("3", 15)] {
        let o = run(&["eigen", "--N", n]);
        assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
        assert_eq!(json(&o)["values"]["dimension"], d);
    }
}

#[test]
fn moments_values() {
    for (n, den) in [("2", "5"), ("3", "10")] {
        let o = run(&["moments", "--N", n, "--mc-samples", "100000"]);
        assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
        let avg = &json(&o)["values"]["cube_average"];
        assert_eq!((avg["num"].as_str(), avg["den"].as_str()), (Some("1"), Some(den)));
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["eigen", "--N", "2", "--seed", "7"][..],
        &["moments", "--N", "2", "--mc-samples", "20000"],
        &["algebra", "--orders", "20"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(without_timings(&a.report).unwrap(), without_timings(&b.report).unwrap());
        assert!(json(&a).get("timings").is_some());
    }
}

#[test]
fn seed_changes_sampled_values() {
    let a = run(&["moments", "--N", "2", "--mc-samples", "20000", "--seed", "1"]);
    let b = run(&["moments", "--N", "2", "--mc-samples", "20000", "--seed", "2"]);
    assert_ne!(json(&a)["values"]["monte_carlo"], json(&b)["values"]["monte_carlo"]);
}

#[test]
fn certificate_round_trip() {
    let o = run(&["certify", "--N", "2"]);
    assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
    let v = json(&o);
    assert_eq!(v["certificate"]["verdict"], "not_local_max");
    let nu3 = v["certificate"]["third_variation"]["value"].as_f64().unwrap();
    assert!((nu3 - 1.8).abs() < 1e-5 * 1.8, "{nu3}");
    assert_eq!(recheck(&o.report).unwrap(), Vec::<String>::new());

    let mut forged = v.clone();
    forged["records"][0]["residual"] = Value::from(1.0);
    let forged = cpn_certify::json::to_text(&forged);
    assert!(!recheck(&forged).unwrap().is_empty());

    let mut flipped = v;
    flipped["certificate"]["diagnostics"] = Value::from(vec!["edited"]);
    assert!(!recheck(&cpn_certify::json::to_text(&flipped)).unwrap().is_empty());
}

#[test]
fn mutation_names_the_formula() {
    let o = run(&["variation", "--N", "2", "--points", "10", "--mutate", "0"]);
    assert_eq!(o.code, EXIT_FAIL);
    let v = json(&o);
    assert_eq!(v["values"]["failing_formulas"], serde_json::json!(["inverse'"]));
    assert_eq!(o.messages.len(), 1);
    assert!(o.messages[0].starts_with("FAIL inverse':"), "{:?}", o.messages);
}

#[test]
fn variation_passes_unmutated() {
    let o = run(&["variation", "--N", "2", "--points", "50", "--seed", "7"]);
    assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
    let short = json(&o)["values"]["shortened_forms"].as_array().unwrap().clone();
    assert!(short.iter().any(|r| r["matches"] == false));
}

#[test]
fn algebra_coefficients() {
    let o = run(&["algebra", "--n", "symbolic", "--orders", "10"]);
    assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
    assert_eq!(
        json(&o)["values"]["shortened"]["third_variation_coefficient"],
        "(n - 2)*(4*pi*tau)^(-n/2)"
    );
    let o = run(&["algebra", "--n", "4", "--orders", "10"]);
    assert_eq!(o.code, EXIT_PASS, "{:?}", o.messages);
    assert_eq!(
        json(&o)["values"]["derived"]["third_variation_coefficient"],
        "2*(4*pi*tau)^(-2)"
    );
}

#[test]
fn config_file_then_flags() {
    let path = tmp("run.conf");
    std::fs::write(&path, "# eigen run\nN = 3\nseed = 11\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&run(&["eigen", "--config", p]));
    assert_eq!(
        (v["config"]["N"].as_u64(), v["config"]["seed"].as_u64()),
        (Some(3), Some(11))
    );
    let v = json(&run(&["eigen", "--config", p, "--N", "2"]));
    assert_eq!(
        (v["config"]["N"].as_u64(), v["config"]["seed"].as_u64()),
        (Some(2), Some(11))
    );
    std::fs::write(&path, "colour = red\n").unwrap();
    assert_eq!(run(&["eigen", "--config", p]).code, EXIT_USAGE);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn binary_writes_out_file() {
    let out = tmp("geometry.json");
    let status = Command::new(env!("CARGO_BIN_EXE_cpn-certify"))
        .args(["geometry", "--N", "2", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.ends_with("}\n"));
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap()["status"], "pass");
    std::fs::remove_file(out).unwrap();

    let o = Command::new(env!("CARGO_BIN_EXE_cpn-certify"))
        .args(["certify", "--N", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires N >= 2"));
    let o = Command::new(env!("CARGO_BIN_EXE_cpn-certify"))
        .args(["geometry", "--N", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
