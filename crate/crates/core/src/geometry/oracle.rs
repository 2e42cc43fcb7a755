//! Independent derivative paths for the metric, used to audit the closed forms.
//!
//! [`ad_metric_jet`] differentiates the plain metric formula by evaluating it
//! on second-order jets. [`fd_metric_jet`] uses central differences with one
//! Richardson step on any metric-valued function of the coordinates.

use crate::jet::Jet2;
use crate::scalar::{lit, Real};

use super::closed_form::real_metric;
use super::{ChartPoint, GeometryJet, MetricJet};

/// Metric jet by forward-mode differentiation of [`real_metric`].
pub fn ad_metric_jet<T: Real>(coords: &[T]) -> MetricJet<T> {
    let d = coords.len();
    let g_jet = real_metric(&Jet2::seed(coords));
    let mut g = Vec::with_capacity(d * d);
    let mut dg = vec![T::zero(); d * d * d];
    let mut ddg = vec![T::zero(); d * d * d * d];
    for (ij, e) in g_jet.iter().enumerate() {
        g.push(e.value);
        for k in 0..d {
            dg[k * d * d + ij] = e.d(k);
            for l in 0..d {
                ddg[(l * d + k) * d * d + ij] = e.dd(l, k);
            }
        }
    }
    MetricJet {
        dim: d,
        g,
        dg,
        ddg: Some(ddg),
    }
}

/// Default step for [`fd_metric_jet`].
pub const FD_STEP: f64 = 1e-4;
/// Step for scalar-curvature comparisons, where contraction with `g⁻¹`
/// amplifies the roundoff of the finer stencil.
pub const SCALAR_FD_STEP: f64 = 1e-3;

/// Metric jet of an arbitrary metric field by Richardson-extrapolated central
/// differences. Truncation error is `O(step⁴)`.
pub fn fd_metric_jet<T: Real>(metric: impl Fn(&[T]) -> Vec<T>, coords: &[T], step: T) -> MetricJet<T> {
    let d = coords.len();
    let dd = d * d;
    let g = metric(coords);
    let at = |shifts: &[(usize, T)]| {
        let mut x = coords.to_vec();
        for &(i, s) in shifts {
            x[i] = x[i] + s;
        }
        metric(&x)
    };
    let four = lit::<T>(4.0);
    let three = lit::<T>(3.0);
    let combine = |coarse: Vec<T>, fine: Vec<T>| -> Vec<T> {
        coarse
            .iter()
            .zip(&fine)
            .map(|(&c, &f)| (four * f - c) / three)
            .collect()
    };

    let first = |k: usize, h: T| -> Vec<T> {
        let p = at(&[(k, h)]);
        let m = at(&[(k, -h)]);
        p.iter().zip(&m).map(|(&a, &b)| (a - b) / (lit::<T>(2.0) * h)).collect()
    };
    let second = |k: usize, l: usize, h: T| -> Vec<T> {
        if k == l {
            let p = at(&[(k, h)]);
            let m = at(&[(k, -h)]);
            (0..dd)
                .map(|e| (p[e] - lit::<T>(2.0) * g[e] + m[e]) / (h * h))
                .collect()
        } else {
            let pp = at(&[(k, h), (l, h)]);
            let pm = at(&[(k, h), (l, -h)]);
            let mp = at(&[(k, -h), (l, h)]);
            let mm = at(&[(k, -h), (l, -h)]);
            (0..dd)
                .map(|e| (pp[e] - pm[e] - mp[e] + mm[e]) / (four * h * h))
                .collect()
        }
    };

    let half = step / lit::<T>(2.0);
    let mut dg = Vec::with_capacity(d * dd);
    for k in 0..d {
        dg.extend(combine(first(k, step), first(k, half)));
    }
    let mut ddg = vec![T::zero(); d * d * dd];
    for l in 0..d {
        for k in l..d {
            let v = combine(second(k, l, step), second(k, l, half));
            ddg[(l * d + k) * dd..(l * d + k + 1) * dd].copy_from_slice(&v);
            ddg[(k * d + l) * dd..(k * d + l + 1) * dd].copy_from_slice(&v);
        }
    }
    MetricJet {
        dim: d,
        g,
        dg,
        ddg: Some(ddg),
    }
}

/// Full curvature from finite differences of the Fubini–Study metric.
pub fn fd_curvature_at<T: Real>(p: &ChartPoint<T>, step: T) -> GeometryJet<T> {
    GeometryJet::from_metric_jet(fd_metric_jet(|x: &[T]| real_metric(x), p.coords(), step))
        .expect("Fubini-Study metric is positive definite in every chart")
}

/// Full curvature from the forward-mode metric jet.
pub fn ad_curvature_at<T: Real>(p: &ChartPoint<T>) -> GeometryJet<T> {
    GeometryJet::from_metric_jet(ad_metric_jet(p.coords()))
        .expect("Fubini-Study metric is positive definite in every chart")
}
