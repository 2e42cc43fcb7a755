//! Acceptance run: one PASS/FAIL line per criterion. Exits 1 if any fail.

use std::time::{Duration, Instant};

use cpn_certify::config::RunConfig;
use cpn_certify::report::{without_timings, Record, Report, Status};
use cpn_certify::run_verb;
use cpn_core::variation::{failing_formulas, single_coefficient_mutations, verify_variation_suite, SuiteOptions};

const EINSTEIN_TOL: f64 = 1e-9;
const TAU_SPREAD_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-8;
const MC_SIGMAS: f64 = 3.0;
const MC_SAMPLES: usize = 1_000_000;
const VARIATION_REL_TOL: f64 = 1e-5;
const VARIATION_POINTS: usize = 50;
const N_TILDE_TOL: f64 = 1e-7;
const V_TOL: f64 = 1e-8;
const SECOND_VARIATION_TOL: f64 = 1e-7;
const FIRST_VARIATION_TOL: f64 = 1e-8;
const HBAR_REL_TOL: f64 = 1e-5;
const NU3_CP2: f64 = 1.8;
const NU3_REL_TOL: f64 = 1e-5;
const PATH_TOL: f64 = 1e-5;
const ORDERS: usize = 100;
const POINTS: usize = 100;
const SEED: u64 = 7;

const GEOMETRY_BUDGET: Duration = Duration::from_secs(30);
const EIGEN_BUDGET: Duration = Duration::from_secs(60);
const CERTIFY_BUDGET: Duration = Duration::from_secs(300);

fn cfg(n: usize) -> RunConfig {
    RunConfig {
        big_n: n,
        points: POINTS,
        seed: SEED,
        mc_samples: MC_SAMPLES,
        ..RunConfig::default()
    }
}

fn record<'a>(rep: &'a Report, name: &str) -> &'a Record {
    rep.records
        .iter()
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("{} has no record {name}", rep.command))
}

/// `residual <= tol` for a record, reading the residual rather than its status.
fn within(rep: &Report, name: &str, tol: f64) -> Result<(), String> {
    match record(rep, name).residual {
        Some(r) if r <= tol => Ok(()),
        r => Err(format!(
            "{} N={} {name}: {r:?} > {tol:e}",
            rep.command, rep.config.big_n
        )),
    }
}

fn all(checks: impl IntoIterator<Item = Result<(), String>>) -> Result<(), String> {
    let errs: Vec<String> = checks.into_iter().filter_map(Result::err).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn budget(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t < limit {
        Ok(())
    } else {
        Err(format!("took {:.1} s, budget {} s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn einstein() -> Result<(), String> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for n in 1..=3 {
        let rep = run_verb("geometry", &cfg(n));
        checks.push(within(&rep, "einstein", EINSTEIN_TOL));
        checks.push(within(&rep, "tau_constant", TAU_SPREAD_TOL));
    }
    checks.push(budget(start, GEOMETRY_BUDGET));
    all(checks)
}

fn eigenspace() -> Result<(), String> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for n in 1..=4 {
        let rep = run_verb("eigen", &cfg(n));
        checks.push(within(&rep, "dimension", 0.0));
        checks.push(within(&rep, "gram_rank", 0.0));
        checks.push(within(&rep, "eigen_residual", EIGEN_TOL));
    }
    checks.push(budget(start, EIGEN_BUDGET));
    all(checks)
}

fn moments() -> Result<(), String> {
    let mut checks = Vec::new();
    for n in 2..=6 {
        let rep = run_verb("moments", &cfg(n));
        checks.push(within(&rep, "cube_average_exact", 0.0));
        let positive = record(&rep, "cube_average_positive").residual.is_some_and(|a| a > 0.0);
        checks.push(positive.then_some(()).ok_or(format!("N={n}: average not positive")));
        checks.push(within(&rep, "cube_average_mc", MC_SIGMAS));
        checks.push(within(&rep, "zero_mean", 0.0));
        checks.push(within(&rep, "symmetry_vanishing", 0.0));
        let samples = rep.values["monte_carlo"]["samples"].as_u64();
        checks.push(
            (samples == Some(MC_SAMPLES as u64))
                .then_some(())
                .ok_or(format!("N={n}: {samples:?} samples")),
        );
    }
    all(checks)
}

fn variation_suite() -> Result<(), String> {
    let mut checks = Vec::new();
    let opts = SuiteOptions {
        points: VARIATION_POINTS,
        seed: SEED,
        rel_tol: VARIATION_REL_TOL,
        ..SuiteOptions::default()
    };
    for n in [2, 3] {
        let rep = run_verb(
            "variation",
            &RunConfig {
                points: VARIATION_POINTS,
                ..cfg(n)
            },
        );
        for r in &rep.records {
            checks.push(within(&rep, &r.name, VARIATION_REL_TOL));
        }
        if rep.records.len() != 10 {
            checks.push(Err(format!("N={n}: {} formulas checked", rep.records.len())));
        }
        for m in single_coefficient_mutations() {
            let caught = verify_variation_suite(n, &opts, Some(m)).map(|r| failing_formulas(&r).contains(&m.formula));
            if caught != Ok(true) {
                checks.push(Err(format!("N={n}: mutation {m} not detected")));
            }
        }
    }
    all(checks)
}

fn stability(certs: &[Report]) -> Result<(), String> {
    let mut checks = Vec::new();
    for rep in certs {
        checks.push(within(rep, "n_tilde_pointwise", N_TILDE_TOL));
        checks.push(within(rep, "v_equation", V_TOL));
        checks.push(within(rep, "second_variation", SECOND_VARIATION_TOL));
        checks.push(within(rep, "tau_prime", FIRST_VARIATION_TOL));
        checks.push(within(rep, "volume_prime", FIRST_VARIATION_TOL));
        checks.push(within(rep, "mean_trace_prime", HBAR_REL_TOL));
    }
    all(checks)
}

fn symbolic() -> Result<(), String> {
    let rep = run_verb(
        "algebra",
        &RunConfig {
            orders: ORDERS,
            ..cfg(2)
        },
    );
    let mut checks = vec![
        within(&rep, "normal_form[shortened]", 0.0),
        within(&rep, "normal_form[derived]", 0.0),
        within(&rep, "no_remainder[shortened]", 0.0),
        within(&rep, "no_remainder[derived]", 0.0),
        within(&rep, "checkpoint[shortened]", 0.0),
        within(&rep, "confluence[shortened]", 0.0),
        within(&rep, "confluence[derived]", 0.0),
    ];
    let coeff = rep.values["shortened"]["third_variation_coefficient"].as_str();
    if coeff != Some("(n - 2)*(4*pi*tau)^(-n/2)") {
        checks.push(Err(format!("coefficient {coeff:?}")));
    }
    all(checks)
}

fn end_to_end(certs: &[Report], elapsed: Duration) -> Result<(), String> {
    let mut checks = Vec::new();
    for rep in certs {
        if rep.status() != Status::Pass {
            checks.push(Err(format!("certify N={} failed", rep.config.big_n)));
        }
        let c = rep.certificate.as_ref().ok_or("no certificate")?;
        if c["verdict"] != "not_local_max" {
            checks.push(Err(format!("N={}: verdict {}", rep.config.big_n, c["verdict"])));
        }
        let gap = c["third"]["relative_path_gap"].as_f64().unwrap_or(f64::INFINITY);
        if !(gap <= PATH_TOL) {
            checks.push(Err(format!("N={}: path gap {gap:e}", rep.config.big_n)));
        }
    }
    let nu3 = certs[0]
        .certificate
        .as_ref()
        .and_then(|c| c["third_variation"]["value"].as_f64())
        .unwrap_or(f64::NAN);
    if !((nu3 - NU3_CP2).abs() <= NU3_REL_TOL * NU3_CP2) {
        checks.push(Err(format!("N=2: third variation {nu3}")));
    }
    if elapsed >= CERTIFY_BUDGET {
        checks.push(Err(format!(
            "took {:.1} s, budget {} s",
            elapsed.as_secs_f64(),
            CERTIFY_BUDGET.as_secs()
        )));
    }
    all(checks)
}

fn determinism() -> Result<(), String> {
    let mut checks = Vec::new();
    for (verb, c) in [
        ("geometry", cfg(2)),
        ("eigen", cfg(2)),
        (
            "moments",
            RunConfig {
                mc_samples: 100_000,
                ..cfg(2)
            },
        ),
        ("variation", RunConfig { points: 10, ..cfg(2) }),
        ("algebra", RunConfig { orders: 20, ..cfg(2) }),
        ("certify", cfg(2)),
    ] {
        let a = without_timings(&run_verb(verb, &c).to_text()).unwrap();
        let b = without_timings(&run_verb(verb, &c).to_text()).unwrap();
        if a != b {
            checks.push(Err(format!("{verb}: reports differ")));
        }
    }
    all(checks)
}

fn main() {
    let mut failed = 0;
    let mut line = |k: usize, what: &str, start: Instant, r: Result<(), String>| {
        let t = start.elapsed().as_secs_f64();
        match r {
            Ok(()) => println!("PASS {k} {what} ({t:.1} s)"),
            Err(e) => {
                failed += 1;
                println!("FAIL {k} {what} ({t:.1} s): {e}");
            }
        }
    };
    let s = Instant::now();
    line(1, "einstein certification", s, einstein());
    let s = Instant::now();
    line(2, "first eigenspace", s, eigenspace());
    let s = Instant::now();
    line(3, "sphere moments", s, moments());
    let s = Instant::now();
    line(4, "variation formulas and mutations", s, variation_suite());

    let s = Instant::now();
    let certs: Vec<Report> = (2..=4).map(|n| run_verb("certify", &cfg(n))).collect();
    let certify_time = s.elapsed();
    line(5, "stability operators", s, stability(&certs));
    let s = Instant::now();
    line(6, "symbolic reduction", s, symbolic());
    line(
        7,
        "end-to-end certificate",
        Instant::now() - certify_time,
        end_to_end(&certs, certify_time),
    );
    let s = Instant::now();
    line(8, "determinism", s, determinism());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
