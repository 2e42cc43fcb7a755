use super::*;

fn quick(points: usize) -> SuiteOptions {
    SuiteOptions {
        points,
        ..SuiteOptions::default()
    }
}

#[test]
fn all_formulas_match_finite_differences() {
    for n in [2, 3] {
        let reports = verify_variation_suite(n, &quick(8), None).unwrap();
        assert_eq!(reports.len(), 10 * 8);
        let bad: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        assert!(bad.is_empty(), "N={n}: {bad:#?}");
    }
}

#[test]
fn shortened_forms_disagree() {
    let reports = compare_shortened_forms(2, &quick(6)).unwrap();
    assert_eq!(
        failing_formulas(&reports),
        vec![FormulaId::LaplacianSecond, FormulaId::RicciSecond]
    );
}

#[test]
fn every_single_mutation_is_caught() {
    let n = 2;
    let opts = quick(4);
    let mutations = single_coefficient_mutations();
    assert_eq!(mutations.len(), 4 * 23);
    for m in mutations {
        let reports = verify_variation_suite(n, &opts, Some(m)).unwrap();
        assert_eq!(failing_formulas(&reports), vec![m.formula], "{m}");
    }
}

#[test]
fn conformal_oracle_agrees_with_direct_geometry() {
    let n = 2;
    let phi = EigenFunction::<f64>::new(special_phi(n).unwrap());
    let u = TestFunction::<f64>::standard(n).unwrap();
    for p in sampling::chart_points(n, 6, 3, sampling::SAMPLE_RADIUS) {
        for s in [-0.1, -0.05, 0.05, 0.1] {
            let direct = family_geometry(&phi, s, &p).unwrap();
            let conf = conformal_geometry(&phi, &u, s, &p).unwrap();
            let uj = u.jet(&p);
            for q in QUANTITIES {
                let a = q.evaluate(&direct, &uj);
                let b = conf.get(q);
                let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                let err = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                assert!(err < 1e-8 * scale, "{q:?} s={s}: {err}");
            }
        }
    }
}

#[test]
fn zero_step_family_is_background() {
    let n = 2;
    let phi = EigenFunction::<f64>::new(special_phi(n).unwrap());
    let p = sampling::chart_points(n, 1, 1, 1.0).remove(0);
    let a = family_geometry(&phi, 0.0, &p).unwrap();
    let b = curvature_at(&p);
    assert!(a.g.iter().zip(&b.g).all(|(x, y)| (x - y).abs() < 1e-15));
    assert!((a.scalar() - 24.0).abs() < 1e-9);
}

#[test]
fn oversized_step_is_rejected() {
    let n = 2;
    let form = special_phi(n).unwrap();
    let eps = family_epsilon(&form);
    let phi = EigenFunction::<f64>::new(form);
    let u = TestFunction::<f64>::standard(n).unwrap();
    let p = ChartPoint::origin(n, 0).unwrap();
    let err = fd_derivative(&phi, &u, Quantity::Scalar, 1, &p, eps).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));
    assert!(fd_derivative(&phi, &u, Quantity::Scalar, 3, &p, 1e-3).is_err());
}

#[test]
fn test_function_needs_two() {
    assert!(TestFunction::<f64>::standard(1).is_err());
}

#[test]
fn single_precision_first_variation() {
    let n = 2;
    let phi = EigenFunction::<f32>::new(special_phi(n).unwrap());
    let u = TestFunction::<f32>::standard(n).unwrap();
    let tau = einstein_tau::<f32>(n).unwrap();
    let p = ChartPoint::<f32>::new(n, 0, vec![0.3, -0.2, 0.1, 0.4]).unwrap();
    let closed = closed_form_derivative(FormulaId::ScalarFirst, &phi, &u, tau, &p);
    let fd = fd_derivative(&phi, &u, Quantity::Scalar, 1, &p, 2e-2).unwrap();
    assert!(
        (closed[0] - fd[0]).abs() < 1e-2 * closed[0].abs().max(1.0),
        "{closed:?} {fd:?}"
    );
}

#[test]
fn scalar_first_variation_is_eigen_multiple() {
    // Δφ = −φ/τ turns R′ into ((n−1) − n/2) φ/τ.
    let n = 3;
    let phi = EigenFunction::<f64>::new(special_phi(n).unwrap());
    let u = TestFunction::<f64>::standard(n).unwrap();
    let tau = einstein_tau::<f64>(n).unwrap();
    for p in sampling::chart_points(n, 4, 5, 1.5) {
        let r = closed_form_derivative(FormulaId::ScalarFirst, &phi, &u, tau, &p)[0];
        let d = 2.0 * n as f64;
        let expect = ((d - 1.0) - d / 2.0) * phi.value(&p) / tau.0;
        assert!((r - expect).abs() < 1e-9 * expect.abs().max(1.0));
    }
}
