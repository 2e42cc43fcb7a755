//! One function per verb. Each fills a [`Report`]; none of them print.

use std::time::Instant;

use serde_json::json;

use cpn_core::algebra::{
    apply_rule, confluence, evaluate_numeric, phi_pow, reduce_third_variation, second_variation_symbolic, Coeff,
    FirstOrderData, Gen, IntegralExpr, Mono, ReductionInputs, Rule,
};
use cpn_core::entropy::{
    certify, CertifyOptions, StabilityCertificate, Verdict, EIGEN_TOL, PATH_AGREEMENT_TOL, SECOND_VARIATION_TOL,
    THIRD_VARIATION_MIN,
};
use cpn_core::geometry::oracle::ad_curvature_at;
use cpn_core::geometry::{curvature_at, pullback_mismatch, ChartPoint};
use cpn_core::moments::{cpn_volume_closed_form, monte_carlo_average, polynomial_average, symmetry_vanishing};
use cpn_core::polynomial::{int, ExactRational, Symmetry};
use cpn_core::quadrature::QuadratureOptions;
use cpn_core::sampling::{chart_points, SAMPLE_RADIUS};
use cpn_core::scalar::max_abs_diff;
use cpn_core::spectral::{basis_first_eigenspace, gram_rank, special_phi, verify_eigen, HermitianForm};
use cpn_core::variation::{
    compare_shortened_forms, failing_formulas, single_coefficient_mutations, verify_variation_suite, FormulaId,
    SuiteOptions, VariationReport,
};
use cpn_core::Error;

use crate::config::RunConfig;
use crate::report::{Bound, Record, Report, Source};

/// Tolerances pinned by the suites.
pub mod tol {
    pub const EINSTEIN: f64 = 1e-9;
    pub const TAU_CONSTANT: f64 = 1e-9;
    pub const SCALAR: f64 = 1e-9;
    pub const INVERSE: f64 = 1e-12;
    pub const RICCI_ORACLE: f64 = 1e-9;
    pub const CHART_PULLBACK: f64 = 1e-10;
    pub const EIGEN: f64 = 1e-8;
    pub const MC_SIGMAS: f64 = 3.0;
    pub const VARIATION_REL: f64 = 1e-5;
    pub const V_EQUATION: f64 = 1e-8;
    pub const N_TILDE: f64 = 1e-7;
    pub const FIRST_VARIATION: f64 = 1e-8;
    pub const HBAR_PRIME_REL: f64 = 1e-5;
    pub const RULE_AUDIT: f64 = 1e-8;
}

const REQUIRES_TWO: &str = "requires N >= 2";

fn timed(report: &mut Report, key: &str, start: Instant) {
    report.timings.insert(key.into(), json!(start.elapsed().as_secs_f64()));
}

fn points(cfg: &RunConfig) -> Vec<ChartPoint<f64>> {
    chart_points(cfg.big_n, cfg.points, cfg.seed, SAMPLE_RADIUS)
}

fn quadrature(cfg: &RunConfig) -> QuadratureOptions {
    QuadratureOptions::with_rel_tol(cfg.quadrature_tol)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn geometry(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("geometry", cfg);
    let nn = cfg.big_n;
    let n = (2 * nn) as f64;
    let r_exact = 4.0 * (nn * (nn + 1)) as f64;
    let tau_exact = 1.0 / (4.0 * (nn + 1) as f64);
    let pts = points(cfg);

    let geos: Vec<_> = pts.iter().map(curvature_at).collect();
    let taus: Vec<f64> = geos.iter().map(|g| n / (2.0 * g.scalar())).collect();
    let tau = taus[0];
    let spread =
        taus.iter().fold(f64::NEG_INFINITY, |m, &t| m.max(t)) - taus.iter().fold(f64::INFINITY, |m, &t| m.min(t));
    let einstein = geos
        .iter()
        .fold(0.0f64, |m, g| m.max(g.einstein_residual(cpn_core::geometry::Tau(tau))));
    let scalar = geos
        .iter()
        .fold(0.0f64, |m, g| m.max((g.scalar() - r_exact).abs() / r_exact));
    let inverse = geos.iter().fold(0.0f64, |m, g| m.max(g.inverse_residual()));
    let oracle = pts.iter().zip(&geos).fold(0.0f64, |m, (p, g)| {
        m.max(max_abs_diff(g.ricci(), ad_curvature_at(p).ricci()))
    });
    let mut pullback = 0.0f64;
    let mut transition_error = None;
    for p in &pts {
        for target in 1..=nn {
            match pullback_mismatch(p, target) {
                Ok(e) => pullback = pullback.max(e),
                Err(Error::OutsideChart { .. }) => {}
                Err(e) => transition_error = Some(e.to_string()),
            }
        }
    }

    rep.push(Record::new(
        "einstein",
        "Ric = g/(2 tau)",
        einstein,
        tol::EINSTEIN,
        Source::Pointwise,
    ));
    rep.push(Record::new(
        "tau_constant",
        "tau = n/(2R) is constant",
        spread,
        tol::TAU_CONSTANT,
        Source::Pointwise,
    ));
    rep.push(Record::new(
        "scalar_curvature",
        "R = 4N(N+1)",
        scalar,
        tol::SCALAR,
        Source::Pointwise,
    ));
    rep.push(Record::new(
        "tau_normalization",
        "tau = 1/(4(N+1))",
        rel(tau, tau_exact),
        tol::SCALAR,
        Source::Pointwise,
    ));
    rep.push(Record::new(
        "inverse_metric",
        "g g^-1 = I",
        inverse,
        tol::INVERSE,
        Source::Pointwise,
    ));
    rep.push(Record::new(
        "ricci_oracle",
        "closed-form Ric equals forward-mode Ric",
        oracle,
        tol::RICCI_ORACLE,
        Source::Pointwise,
    ));
    let pb = Record::new(
        "chart_transition",
        "overlapping charts give the same metric",
        pullback,
        tol::CHART_PULLBACK,
        Source::Pointwise,
    );
    rep.push(match transition_error {
        Some(e) => Record::error("chart_transition", "overlapping charts give the same metric", e),
        None => pb,
    });
    rep.value("R", r_exact);
    rep.value("R_sampled", geos[0].scalar());
    rep.value("tau", tau);
    rep.value("volume", cpn_volume_closed_form(nn));
    timed(&mut rep, "total_seconds", start);
    rep
}

pub fn eigen(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("eigen", cfg);
    let nn = cfg.big_n;
    let expected = nn * (nn + 2);
    let anchor_dim = "dim E_1 = (N+1)^2 - 1 = N(N+2)";
    let basis = match basis_first_eigenspace(nn) {
        Ok(b) => b,
        Err(e) => {
            rep.push(Record::error("dimension", anchor_dim, e.to_string()));
            return rep;
        }
    };
    rep.push(Record::new(
        "dimension",
        anchor_dim,
        (basis.len() as f64 - expected as f64).abs(),
        0.0,
        Source::Exact,
    ));
    match gram_rank(&basis) {
        Ok(r) => rep.push(Record::new(
            "gram_rank",
            anchor_dim,
            (r as f64 - expected as f64).abs(),
            0.0,
            Source::Exact,
        )),
        Err(e) => rep.push(Record::error("gram_rank", anchor_dim, e.to_string())),
    }
    rep.push(Record::holds(
        "trace_free",
        "first eigenfunctions come from trace-free Hermitian forms",
        basis.iter().all(HermitianForm::is_trace_free),
        Source::Exact,
    ));
    let tau = cpn_core::geometry::Tau(1.0 / (4.0 * (nn + 1) as f64));
    let pts = points(cfg);
    let worst = basis.iter().map(|f| verify_eigen(f, tau, &pts)).fold(0.0f64, f64::max);
    rep.push(Record::new(
        "eigen_residual",
        "(lap + 1/tau) phi = 0",
        worst,
        tol::EIGEN,
        Source::Pointwise,
    ));
    rep.value("dimension", basis.len());
    rep.value("expected_dimension", expected);
    rep.value("max_residual", worst);
    timed(&mut rep, "total_seconds", start);
    rep
}

pub fn moments(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("moments", cfg);
    let nn = cfg.big_n;
    let anchor = "avg f^3 over S^{2N+1} = 12/((N+1)(N+2)(N+3))";
    let form = match special_phi(nn) {
        Ok(f) => f,
        Err(_) => {
            rep.push(Record::error("requires_two", REQUIRES_TWO, format!("got N = {nn}")));
            return rep;
        }
    };
    let p = form.to_polynomial();
    let cube = p.pow(3);
    let expected = int(12) / int(((nn + 1) * (nn + 2) * (nn + 3)) as i64);
    match polynomial_average(&cube) {
        Ok(avg) => {
            let diff = ExactRational(&avg - &expected).to_f64().abs();
            rep.push(Record::new("cube_average_exact", anchor, diff, 0.0, Source::Exact));
            rep.push(Record::with_bound(
                "cube_average_positive",
                "avg f^3 > 0",
                ExactRational(avg.clone()).to_f64(),
                0.0,
                Bound::Min,
                Source::Exact,
            ));
            let fact: i64 = (1..=nn as i64).product();
            rep.value("cube_average", ExactRational(avg.clone()));
            rep.value("cube_integral_pi_coefficient", ExactRational(&avg / &int(fact)));
            rep.value(
                "cube_integral",
                ExactRational(avg).to_f64() * cpn_volume_closed_form(nn),
            );
        }
        Err(e) => rep.push(Record::error("cube_average_exact", anchor, e.to_string())),
    }
    rep.value("expected_cube_average", ExactRational(expected.clone()));
    rep.value("sphere", format!("S^{}", 2 * nn + 1));
    match monte_carlo_average(&cube, cfg.mc_samples, cfg.seed) {
        Ok(mc) => {
            let z = mc.z_score(ExactRational(expected).to_f64());
            rep.push(Record::new(
                "cube_average_mc",
                "Monte Carlo avg f^3 agrees with the exact value",
                z,
                tol::MC_SIGMAS,
                Source::MonteCarlo,
            ));
            rep.value("monte_carlo", mc);
        }
        Err(e) => rep.push(Record::error(
            "cube_average_mc",
            "Monte Carlo avg f^3 agrees with the exact value",
            e.to_string(),
        )),
    }
    let mut means_zero = polynomial_average(&p).map(|a| a == int(0)).unwrap_or(false);
    if let Ok(basis) = basis_first_eigenspace(nn) {
        for b in &basis {
            means_zero &= polynomial_average(&b.to_polynomial())
                .map(|a| a == int(0))
                .unwrap_or(false);
        }
    }
    rep.push(Record::holds(
        "zero_mean",
        "avg phi = 0 for trace-free forms",
        means_zero,
        Source::Exact,
    ));
    let odd = HermitianForm::symmetric_unit(nn, 0, 1).to_polynomial().pow(3);
    let sym = symmetry_vanishing(&odd, Symmetry::Negate(0));
    let avg_zero = polynomial_average(&odd).map(|a| a == int(0)).unwrap_or(false);
    rep.push(Record::holds(
        "symmetry_vanishing",
        "a polynomial odd under z_1 -> -z_1 has zero average",
        sym && avg_zero,
        Source::Exact,
    ));
    timed(&mut rep, "total_seconds", start);
    rep
}

fn formula_anchor(id: FormulaId) -> &'static str {
    match id {
        FormulaId::InverseFirst => "(g^-1)' = -phi g^-1",
        FormulaId::ChristoffelFirst => "Gamma'^k_ij = (phi_i d^k_j + phi_j d^k_i - phi^k g_ij)/2",
        FormulaId::RiemannFirst => "Rm' = (hess phi wedge metric terms)/2",
        FormulaId::ScalarFirst => "R' = -(n-1) lap phi - (n/2) phi/tau",
        FormulaId::VolumeFirst => "dV' = (n/2) phi dV",
        FormulaId::LaplacianFirst => "lap' u = -phi lap u + ((n-2)/2) <grad phi, grad u>",
        FormulaId::InverseSecond => "(g^-1)'' = 2 phi^2 g^-1",
        FormulaId::ChristoffelSecond => "Gamma'' = -2 phi Gamma'",
        FormulaId::LaplacianSecond => "lap'' u = 2 phi^2 lap u - 2(n-2) phi <grad phi, grad u>",
        FormulaId::RicciSecond => {
            "Ric'' = (phi lap phi - ((n-4)/2)|grad phi|^2) g + (n-2)(phi hess phi + (3/2) dphi dphi)"
        }
    }
}

fn worst_by_formula(reports: &[VariationReport]) -> Vec<(FormulaId, f64, f64)> {
    let mut out: Vec<(FormulaId, f64, f64)> = Vec::new();
    for r in reports {
        match out.iter_mut().find(|(id, _, _)| *id == r.formula) {
            Some(e) => {
                e.1 = e.1.max(r.floored_residual);
                e.2 = e.2.max(r.rel_residual);
            }
            None => out.push((r.formula, r.floored_residual, r.rel_residual)),
        }
    }
    out
}

pub fn variation(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("variation", cfg);
    let opts = SuiteOptions {
        points: cfg.points,
        seed: cfg.seed,
        rel_tol: tol::VARIATION_REL,
        ..SuiteOptions::default()
    };
    let mutation = cfg.mutate.map(|k| single_coefficient_mutations()[k]);
    if let Some(m) = mutation {
        rep.value("mutation", m.to_string());
    }
    let reports = match verify_variation_suite(cfg.big_n, &opts, mutation) {
        Ok(r) => r,
        Err(e) => {
            let anchor = if matches!(e, Error::RequiresTwo(_)) {
                REQUIRES_TWO
            } else {
                "closed forms match finite differences"
            };
            rep.push(Record::error("variation_suite", anchor, e.to_string()));
            return rep;
        }
    };
    for (id, floored, _) in worst_by_formula(&reports) {
        rep.push(Record::new(
            id.name(),
            formula_anchor(id),
            floored,
            tol::VARIATION_REL,
            Source::FiniteDifference,
        ));
    }
    rep.value(
        "failing_formulas",
        failing_formulas(&reports).iter().map(|f| f.name()).collect::<Vec<_>>(),
    );
    if let Ok(short) = compare_shortened_forms(cfg.big_n, &opts) {
        let rows: Vec<_> = worst_by_formula(&short)
            .into_iter()
            .map(|(id, floored, relative)| {
                json!({"formula": id.name(), "max_relative_residual": relative, "matches": floored <= tol::VARIATION_REL})
            })
            .collect();
        rep.value("shortened_forms", rows);
    }
    timed(&mut rep, "total_seconds", start);
    rep
}

fn rule_audit(nn: usize, opts: QuadratureOptions) -> Result<f64, Error> {
    let cases = [
        (Rule::Eigen, phi_pow(2).with(Gen::LapPhi, 1)),
        (Rule::Eigen, phi_pow(1).with(Gen::LapPhi, 2)),
        (Rule::GradientReduction, phi_pow(1).with(Gen::GradSq, 1)),
        (Rule::GradientReduction, Mono::of(Gen::GradSq)),
        (Rule::ZeroMean, phi_pow(1)),
    ];
    let mut worst = 0.0f64;
    for (rule, m) in cases {
        let lhs = IntegralExpr::of(Coeff::one(), m);
        let rhs = apply_rule(rule, &lhs, None);
        let a = evaluate_numeric(&lhs, nn, opts)?;
        let b = evaluate_numeric(&rhs, nn, opts)?;
        worst = worst.max((a - b).abs() / (1.0 + a.abs()));
    }
    Ok(worst)
}

pub fn algebra(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("algebra", cfg);
    let n = cfg.n_value().expect("validated");
    let anchor_nf = "nu''' = (n-2)(4 pi tau)^(-n/2) int phi^3";
    let anchor_cp = "nu''' = -tau (4 pi tau)^(-n/2) [2(n-1) int phi^2 lap phi + int phi lap f'']";
    for (label, inputs) in [
        ("shortened", ReductionInputs::shortened()),
        ("derived", ReductionInputs::derived()),
    ] {
        match reduce_third_variation(n, &inputs) {
            Ok(r) => {
                rep.push(Record::holds(
                    format!("normal_form[{label}]"),
                    anchor_nf,
                    r.matches_expected,
                    Source::Symbolic,
                ));
                rep.push(Record::holds(
                    format!("no_remainder[{label}]"),
                    "no int phi^2 or tau'' terms survive",
                    r.phi2_coefficient == "0" && r.tau_second_free,
                    Source::Symbolic,
                ));
                if label == "shortened" {
                    rep.push(Record::holds(
                        format!("checkpoint[{label}]"),
                        anchor_cp,
                        r.checkpoint_matches,
                        Source::Symbolic,
                    ));
                }
                rep.value(label, &r);
            }
            Err(e) => rep.push(Record::error(format!("normal_form[{label}]"), anchor_nf, e.to_string())),
        }
        let name = format!("confluence[{label}]");
        match confluence(n, &inputs, cfg.orders, cfg.seed) {
            Ok(c) => rep.push(
                Record::new(
                    &name,
                    "every rule order reaches the same normal form",
                    (c.distinct_normal_forms - 1) as f64,
                    0.0,
                    Source::Symbolic,
                )
                .detail(format!("{} orders", c.orders)),
            ),
            Err(e) => rep.push(Record::error(
                &name,
                "every rule order reaches the same normal form",
                e.to_string(),
            )),
        }
    }
    match second_variation_symbolic(n, &FirstOrderData::from_tables()) {
        Ok(e) => rep.push(Record::holds(
            "second_variation",
            "nu'' = 0 along phi g",
            e.is_zero(),
            Source::Symbolic,
        )),
        Err(e) => rep.push(Record::error("second_variation", "nu'' = 0 along phi g", e.to_string())),
    }
    match rule_audit(2, quadrature(cfg)) {
        Ok(w) => rep.push(Record::new(
            "rule_audit_cp2",
            "rewrite rules preserve integrals on CP^2",
            w,
            tol::RULE_AUDIT,
            Source::Quadrature,
        )),
        Err(e) => rep.push(Record::error(
            "rule_audit_cp2",
            "rewrite rules preserve integrals on CP^2",
            e.to_string(),
        )),
    }
    timed(&mut rep, "total_seconds", start);
    rep
}

fn certificate_records(c: &StabilityCertificate) -> Vec<Record> {
    let hbar = rel(c.hbar_prime_fd.value, c.hbar_prime.value);
    vec![
        Record::new(
            "eigen_residual",
            "(lap + 1/tau) phi = 0",
            c.eigen_residual.value,
            EIGEN_TOL,
            Source::Pointwise,
        ),
        Record::new(
            "v_equation",
            "v = 2 phi",
            c.v_residual.value,
            tol::V_EQUATION,
            Source::Pointwise,
        ),
        Record::new(
            "n_tilde_pointwise",
            "N~(phi g) = 0 pointwise",
            c.n_tilde_max.value,
            tol::N_TILDE,
            Source::Pointwise,
        ),
        Record::new(
            "tau_prime",
            "tau' = 0",
            c.tau_prime.value.abs(),
            tol::FIRST_VARIATION,
            Source::Quadrature,
        ),
        Record::new(
            "volume_prime",
            "V' = 0",
            c.volume_prime.value.abs(),
            tol::FIRST_VARIATION,
            Source::Quadrature,
        ),
        Record::new(
            "mean_trace_prime",
            "Hbar' = n(n-2)/(2V) ||phi||^2",
            hbar,
            tol::HBAR_PRIME_REL,
            Source::FiniteDifference,
        ),
        Record::new(
            "second_variation",
            "nu'' = 0",
            c.second_variation.value.abs(),
            SECOND_VARIATION_TOL,
            Source::Quadrature,
        ),
        Record::with_bound(
            "third_variation_nonzero",
            "nu''' = (n-2)(4 pi tau)^(-n/2) int phi^3 != 0",
            c.third_variation.value.abs(),
            THIRD_VARIATION_MIN,
            Bound::Min,
            Source::Exact,
        ),
        Record::new(
            "third_variation_paths",
            "exact and quadrature int phi^3 agree",
            c.third.relative_path_gap,
            PATH_AGREEMENT_TOL,
            Source::Both,
        ),
        Record::holds(
            "verdict",
            "nu' = 0, nu'' = 0, nu''' != 0: not a local maximum of nu",
            c.verdict == Verdict::NotLocalMax,
            Source::Both,
        ),
    ]
}

pub fn certify_cmd(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut rep = Report::new("certify", cfg);
    let opts = CertifyOptions {
        points: cfg.points,
        seed: cfg.seed,
        quadrature: quadrature(cfg),
    };
    match certify(cfg.big_n, &opts) {
        Ok(c) => {
            for r in certificate_records(&c) {
                rep.push(r);
            }
            rep.value("verdict", c.verdict);
            rep.value("third_variation", c.third_variation.value);
            rep.value("measure_ratio", c.third.measure_ratio);
            rep.value("third_variation_unit_mass", c.third.value_unit_mass);
            rep.certificate = Some(serde_json::to_value(&c).expect("certificate serializes"));
        }
        Err(Error::RequiresTwo(k)) => rep.push(Record::error("requires_two", REQUIRES_TWO, format!("got N = {k}"))),
        Err(e) => rep.push(Record::error("certify", "certificate could be computed", e.to_string())),
    }
    timed(&mut rep, "total_seconds", start);
    rep
}
