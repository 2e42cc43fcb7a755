use super::*;
use crate::polynomial::rat;
use crate::spectral::basis_first_eigenspace;
use num_traits::Zero;

fn special(nn: usize) -> ConformalPerturbation {
    ConformalPerturbation::new(special_phi(nn).unwrap()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn n_tilde_vanishes_for_conformal_eigen_direction() {
    let h = special(2);
    for p in sampling::chart_points(2, 20, 7, sampling::SAMPLE_RADIUS) {
        let nt = n_tilde_at(&h, &p);
        assert!(max_abs(&nt) < 1e-7, "{}", max_abs(&nt));
        let (a, b) = n_tilde_decomposition_at(&h, &p);
        assert!(a < 1e-7 && b < 1e-7);
    }
}

#[test]
fn dropping_hessian_term_leaves_hessian_scale() {
    let h = special(2);
    let p = sampling::chart_points(2, 1, 11, 1.0).remove(0);
    let terms = NTildeTerms {
        hessian_v: false,
        ..NTildeTerms::default()
    };
    let nt = n_tilde_terms_at(&h, &p, terms);
    // Ñ without ½∇²v is −∇²ψ.
    let hess = curvature_at(&p).covariant_hessian(&h.psi().jet(&p));
    for (a, b) in nt.iter().zip(&hess) {
        assert!((a + b).abs() < 1e-9);
    }
    assert!(max_abs(&nt) > 1e-2);
}

#[test]
fn every_term_of_n_tilde_is_needed() {
    let h = special(2);
    let p = sampling::chart_points(2, 1, 12, 1.0).remove(0);
    let full = NTildeTerms::default();
    for terms in [
        NTildeTerms {
            laplacian: false,
            ..full
        },
        NTildeTerms {
            curvature: false,
            ..full
        },
        NTildeTerms {
            divergence: false,
            ..full
        },
        NTildeTerms {
            hessian_v: false,
            ..full
        },
    ] {
        assert!(max_abs(&n_tilde_terms_at(&h, &p, terms)) > 1e-3, "{terms:?}");
    }
}

#[test]
fn zero_perturbation() {
    let h = ConformalPerturbation::new(HermitianForm::zero(2)).unwrap();
    let p = sampling::chart_points(2, 1, 3, 1.0).remove(0);
    assert_eq!(max_abs(&n_tilde_at(&h, &p)), 0.0);
    assert_eq!(v_of(&h).unwrap().value(&p), 0.0);
    let s = second_variation(&h, QuadratureOptions::default()).unwrap();
    assert_eq!(s.value, 0.0);
}

#[test]
fn v_equation_holds() {
    for nn in [2, 3] {
        let h = special(nn);
        let pts = sampling::chart_points(nn, 20, 5, sampling::SAMPLE_RADIUS);
        assert!(v_equation_residual(&h, &pts).unwrap() < 1e-8);
    }
}

#[test]
fn basis_directions_have_zero_mean() {
    for a in basis_first_eigenspace(2).unwrap() {
        let h = ConformalPerturbation::new(a).unwrap();
        assert!(h.mean_trace().unwrap().is_zero());
    }
}

#[test]
fn non_eigen_psi_is_rejected() {
    let id = HermitianForm::diagonal(&[int(1), int(0), int(0)]).unwrap();
    assert!(matches!(
        ConformalPerturbation::new(id.clone()),
        Err(Error::EigenResidual { .. })
    ));
    let h = ConformalPerturbation::unchecked(id).unwrap();
    assert!(v_of(&h).is_err());
}

#[test]
fn mean_trace_shift_for_constant_psi() {
    // ψ ≡ 1: H̄ = n and N − Ñ = −(n / 2nτ) g.
    let id = HermitianForm::diagonal(&[int(1), int(1), int(1)]).unwrap();
    let h = ConformalPerturbation::unchecked(id).unwrap();
    assert_eq!(h.mean_trace().unwrap(), int(4));
    let p = sampling::chart_points(2, 1, 9, 1.0).remove(0);
    let g = real_metric(p.coords());
    let c = 4.0 / (2.0 * 4.0 * h.tau().0);
    let diff: Vec<f64> = n_operator_at(&h, &p)
        .unwrap()
        .iter()
        .zip(n_tilde_at(&h, &p))
        .map(|(a, b)| a - b)
        .collect();
    for (d, gij) in diff.iter().zip(&g) {
        assert!((d + c * gij).abs() < 1e-12);
    }
}

#[test]
fn n_operator_is_linear() {
    let basis = basis_first_eigenspace(2).unwrap();
    let h1 = ConformalPerturbation::unchecked(basis[0].clone()).unwrap();
    let h2 = ConformalPerturbation::unchecked(basis[5].scale(&rat(3, 2))).unwrap();
    let sum = h1.plus(&h2);
    let diag = HermitianForm::diagonal(&[int(2), int(-1), int(0)]).unwrap();
    let h3 = ConformalPerturbation::unchecked(diag).unwrap();
    for p in sampling::chart_points(2, 5, 2, 1.5) {
        let a = n_operator_at(&sum, &p).unwrap();
        let b1 = n_operator_at(&h1, &p).unwrap();
        let b2 = n_operator_at(&h2, &p).unwrap();
        for k in 0..a.len() {
            assert!((a[k] - b1[k] - b2[k]).abs() < 1e-10);
        }
        let c = n_operator_at(&h3.plus(&h3), &p).unwrap();
        let c1 = n_operator_at(&h3, &p).unwrap();
        for k in 0..c.len() {
            assert!((c[k] - 2.0 * c1[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn first_variations_for_special_direction() {
    let h = special(2);
    let f = first_variations(&h, QuadratureOptions::default()).unwrap();
    assert!(f.tau_prime.value.abs() < 1e-8, "{:?}", f.tau_prime);
    assert!(f.volume_prime.value.abs() < 1e-8, "{:?}", f.volume_prime);
    assert_eq!(f.hbar_prime_exact, 2.0);
    assert!((f.hbar_prime_closed.value - 2.0).abs() < 1e-8);
    assert!((f.hbar_prime_fd - 2.0).abs() < 1e-5 * 2.0, "{}", f.hbar_prime_fd);
}

#[test]
fn second_variation_vanishes_and_scales() {
    let h = special(2);
    let opts = QuadratureOptions::default();
    let s1 = second_variation(&h, opts).unwrap();
    assert!(s1.value.abs() < 1e-7, "{s1:?}");
    let s2 = second_variation(&h.scaled(&int(2)), opts).unwrap();
    assert_eq!(s2.value, 4.0 * s1.value);
}

#[test]
fn third_variation_n2() {
    let t = third_variation(2, QuadratureOptions::default()).unwrap();
    assert_eq!(t.cube_average.0, rat(1, 5));
    assert_eq!(t.cube_integral_pi_coefficient.0, rat(1, 10));
    assert!((t.value_exact - 1.8).abs() < 1e-12, "{}", t.value_exact);
    assert!((t.value_quadrature - 1.8).abs() < 1e-5 * 1.8);
    assert!((t.measure_ratio - 4.5).abs() < 1e-12);
    assert!((t.value_unit_mass - 0.4).abs() < 1e-12);
}

#[test]
fn third_variation_is_odd() {
    let h = special(2);
    let opts = QuadratureOptions::default();
    let a = third_variation_for(&h, opts).unwrap();
    let b = third_variation_for(&h.scaled(&int(-1)), opts).unwrap();
    assert_eq!(a.value_exact, -b.value_exact);
    assert_eq!(a.value_quadrature, -b.value_quadrature);
}

#[test]
fn certify_rejects_n1() {
    assert_eq!(
        certify(1, &CertifyOptions::default()).unwrap_err(),
        Error::RequiresTwo(1)
    );
}

#[test]
fn certify_n2() {
    let c = certify(
        2,
        &CertifyOptions {
            points: 20,
            ..CertifyOptions::default()
        },
    )
    .unwrap();
    assert_eq!(c.verdict, Verdict::NotLocalMax, "{:?}", c.diagnostics);
    assert!((c.third_variation.value - 1.8).abs() < 1e-5 * 1.8);
}

#[test]
fn f_prime_is_consistent_with_v() {
    for n in [4i64, 6, 8, 10] {
        let c = f_prime_coefficient(n);
        // v = −2f′ + H = (−2c + n) φ must equal 2φ.
        assert_eq!(-int(2) * c + int(n), int(2));
    }
}
