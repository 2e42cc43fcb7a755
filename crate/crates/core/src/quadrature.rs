//! Adaptive chart quadrature on CP^N.
//!
//! Chart-0 coordinates `w_j = ρ_j e^{iα_j}` are compactified by
//! `p_j = ρ_j² / (1 + |w|²)`, which maps `C^N` onto the open simplex
//! `{p_j > 0, Σ p_j < 1}`; the Euclidean volume element becomes
//! `2^{-N} (1+|w|²)^{N+1} dp dα`. The simplex is covered by a Duffy
//! map from the unit cube with Gauss–Legendre nodes in every direction,
//! and each phase `α_j` uses the trapezoid rule, which is exact for
//! trigonometric polynomials of low degree. The metric volume density is
//! taken from the metric itself at every node.
//!
//! Level `L` uses `2 + L` Gauss nodes per simplex direction and `3 + L`
//! phase nodes; integration stops once two consecutive levels agree.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::closed_form::real_metric;
use crate::geometry::ChartPoint;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_level: usize,
    pub max_level: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            min_level: 1,
            max_level: 6,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Integrals of each integrand component with error estimates from the last
/// level difference.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub level: usize,
    pub nodes: usize,
}

impl QuadratureResult {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn error(&self) -> f64 {
        self.errors[0]
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(points: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points).expect("at least one node"));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect()
}

/// Simplex nodes `p ∈ R^N` with weights, from the Duffy map of a tensor rule.
fn simplex_nodes(n: usize, per_axis: usize) -> Vec<(Vec<f64>, f64)> {
    let gl = gauss_legendre_unit(per_axis);
    let total = per_axis.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = Vec::with_capacity(n);
            let mut remaining = 1.0;
            let mut weight = 1.0;
            for _ in 0..n {
                let (u, w) = gl[idx % per_axis];
                idx /= per_axis;
                p.push(remaining * u);
                weight *= w * remaining;
                remaining *= 1.0 - u;
            }
            (p, weight)
        })
        .collect()
}

/// One tensor-product evaluation at level `level`. Returns the integrals and
/// the node count.
fn evaluate_level<F>(n: usize, components: usize, level: usize, f: &F) -> (Vec<f64>, usize)
where
    F: Fn(&ChartPoint<f64>) -> Vec<f64> + Sync,
{
    let per_axis = 2 + level;
    let phases = 3 + level;
    let simplex = simplex_nodes(n, per_axis);
    let torus = phases.pow(n as u32);
    let dalpha = 2.0 * PI / phases as f64;
    let phase_weight = dalpha.powi(n as i32) * 0.5f64.powi(n as i32);

    let partials: Vec<Vec<f64>> = simplex
        .par_iter()
        .map(|(p, w_simplex)| {
            let p0 = 1.0 - p.iter().sum::<f64>();
            let moduli: Vec<f64> = p.iter().map(|pj| (pj / p0).sqrt()).collect();
            // (1 + |w|²)^{N+1} = p0^{-(N+1)}
            let jac = p0.powi(-(n as i32 + 1));
            let mut acc = vec![0.0; components];
            let mut coords = vec![0.0; 2 * n];
            for mut t in 0..torus {
                for j in 0..n {
                    let alpha = dalpha * (t % phases) as f64;
                    t /= phases;
                    coords[2 * j] = moduli[j] * alpha.cos();
                    coords[2 * j + 1] = moduli[j] * alpha.sin();
                }
                let g = real_metric(&coords);
                let density = linalg::sqrt_det_spd(&g, 2 * n).expect("metric positive definite");
                let point = ChartPoint::new(n, 0, coords.clone()).expect("finite chart point");
                let vals = f(&point);
                debug_assert_eq!(vals.len(), components);
                let w = w_simplex * jac * density * phase_weight;
                for (a, v) in acc.iter_mut().zip(vals) {
                    *a += w * v;
                }
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; components];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    (total, simplex.len() * torus)
}

/// Integrates each component of `f` over CP^N with the Fubini–Study volume.
/// Levels increase until consecutive results agree within
/// `rel_tol · |value| + abs_tol` for every component.
pub fn integrate_cpn<F>(n: usize, components: usize, opts: QuadratureOptions, f: F) -> Result<QuadratureResult>
where
    F: Fn(&ChartPoint<f64>) -> Vec<f64> + Sync,
{
    if n == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let (mut prev, _) = evaluate_level(n, components, opts.min_level, &f);
    let mut last = (prev.clone(), vec![f64::INFINITY; components]);
    for level in opts.min_level + 1..=opts.max_level {
        let (cur, nodes) = evaluate_level(n, components, level, &f);
        let errors: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).collect();
        let ok = cur
            .iter()
            .zip(&errors)
            .all(|(v, e)| *e <= opts.rel_tol * v.abs() + opts.abs_tol);
        if ok {
            return Ok(QuadratureResult {
                values: cur,
                errors,
                level,
                nodes,
            });
        }
        last = (cur.clone(), errors);
        prev = cur;
    }
    let (values, errors) = last;
    let worst = (0..components)
        .max_by(|&a, &b| errors[a].partial_cmp(&errors[b]).unwrap())
        .unwrap_or(0);
    Err(Error::QuadratureNotConverged {
        estimate: values[worst],
        error: errors[worst],
    })
}

/// Scalar convenience wrapper around [`integrate_cpn`].
pub fn integrate_cpn_scalar<F>(n: usize, opts: QuadratureOptions, f: F) -> Result<QuadratureResult>
where
    F: Fn(&ChartPoint<f64>) -> f64 + Sync,
{
    integrate_cpn(n, 1, opts, |p| vec![f(p)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_on_unit_interval() {
        let rule = gauss_legendre_unit(5);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-15);
    }

    #[test]
    fn simplex_weights_sum_to_volume() {
        for n in 1..=4 {
            let total: f64 = simplex_nodes(n, 4).iter().map(|(_, w)| w).sum();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((total - 1.0 / fact).abs() < 1e-14);
        }
    }

    #[test]
    fn volumes() {
        for n in 1..=3 {
            let r = integrate_cpn_scalar(n, QuadratureOptions::default(), |_| 1.0).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let exact = PI.powi(n as i32) / fact;
            assert!((r.value() - exact).abs() < 1e-10 * exact, "N={n}: {}", r.value());
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = QuadratureOptions {
            rel_tol: 0.0,
            abs_tol: 0.0,
            min_level: 0,
            max_level: 1,
        };
        let err = integrate_cpn_scalar(1, opts, |p| (10.0 * p.coords()[0]).sin().exp()).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
