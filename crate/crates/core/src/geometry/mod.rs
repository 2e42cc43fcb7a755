//! Fubini–Study geometry of CP^N in the standard affine charts.
//!
//! The metric is normalized so that it is the identity at every chart
//! origin. Curvature is assembled from exact coordinate derivatives of the
//! metric; nothing here hard-codes the Einstein constant, which is recovered
//! from the scalar curvature by [`einstein_tau`].
//!
//! Index conventions (all arrays row-major, `d = 2N`):
//! - `g[i][j]`, `dg[k][i][j] = ∂_k g_ij`, `ddg[l][k][i][j] = ∂_l ∂_k g_ij`
//! - `christoffel[k][i][j] = Γ^k_ij`, `dchristoffel[m][k][i][j] = ∂_m Γ^k_ij`
//! - `riemann[i][j][k][l] = R_ijk^l = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`
//! - `ricci[j][k] = R_ijk^i`

pub mod closed_form;
pub mod oracle;

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg;
use crate::sampling;
use crate::scalar::{count, lit, Real};

/// A point of CP^N in the affine chart where homogeneous coordinate
/// `chart` equals one. `coords` holds the remaining N complex coordinates
/// as interleaved real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<T> {
    n: usize,
    chart: usize,
    coords: Vec<T>,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(n: usize, chart: usize, coords: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if chart > n {
            return Err(Error::ChartIndex { chart, n });
        }
        if coords.len() != 2 * n {
            return Err(Error::CoordinateCount {
                expected: 2 * n,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, chart, coords })
    }

    pub fn origin(n: usize, chart: usize) -> Result<Self> {
        Self::new(n, chart, vec![T::zero(); 2 * n])
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Homogeneous coordinates `(re, im)` with a one in slot `chart`.
    pub fn homogeneous(&self) -> Vec<(T, T)> {
        let mut z = Vec::with_capacity(self.n + 1);
        let mut k = 0;
        for slot in 0..=self.n {
            if slot == self.chart {
                z.push((T::one(), T::zero()));
            } else {
                z.push((self.coords[2 * k], self.coords[2 * k + 1]));
                k += 1;
            }
        }
        z
    }

    /// Unit-norm representative on S^{2N+1}.
    pub fn lift_to_sphere(&self) -> Vec<(T, T)> {
        let z = self.homogeneous();
        let norm = z.iter().fold(T::zero(), |s, (a, b)| s + *a * *a + *b * *b).sqrt();
        z.into_iter().map(|(a, b)| (a / norm, b / norm)).collect()
    }

    /// The point with homogeneous coordinates `z`, expressed in chart `chart`.
    pub fn from_homogeneous(z: &[(T, T)], chart: usize) -> Result<Self> {
        let n = z.len().checked_sub(1).ok_or(Error::Dimension { min: 1, got: 0 })?;
        if chart > n {
            return Err(Error::ChartIndex { chart, n });
        }
        let (pr, pi) = z[chart];
        let den = pr * pr + pi * pi;
        if den == T::zero() {
            return Err(Error::OutsideChart { target: chart });
        }
        let mut coords = Vec::with_capacity(2 * n);
        for (slot, &(a, b)) in z.iter().enumerate() {
            if slot == chart {
                continue;
            }
            coords.push((a * pr + b * pi) / den);
            coords.push((b * pr - a * pi) / den);
        }
        Self::new(n, chart, coords)
    }

    pub fn cast<U: Real>(&self) -> ChartPoint<U> {
        ChartPoint {
            n: self.n,
            chart: self.chart,
            coords: self
                .coords
                .iter()
                .map(|c| U::from_f64(c.to_f64().unwrap()).unwrap())
                .collect(),
        }
    }
}

/// Metric with one or two orders of coordinate derivatives.
#[derive(Clone, Debug)]
pub struct MetricJet<T> {
    pub dim: usize,
    pub g: Vec<T>,
    pub dg: Vec<T>,
    pub ddg: Option<Vec<T>>,
}

/// Curvature data present on a full [`GeometryJet`].
#[derive(Clone, Debug)]
pub struct Curvature<T> {
    pub ddg: Vec<T>,
    pub dchristoffel: Vec<T>,
    pub riemann: Vec<T>,
    pub ricci: Vec<T>,
    pub scalar: T,
}

/// Pointwise Riemannian data: metric, inverse, Levi-Civita connection and,
/// when second metric derivatives were supplied, the curvature.
#[derive(Clone, Debug)]
pub struct GeometryJet<T> {
    pub dim: usize,
    pub g: Vec<T>,
    pub g_inv: Vec<T>,
    pub dg: Vec<T>,
    pub christoffel: Vec<T>,
    pub curvature: Option<Curvature<T>>,
}

impl<T: Real> GeometryJet<T> {
    pub fn from_metric_jet(jet: MetricJet<T>) -> Result<Self> {
        let d = jet.dim;
        linalg::cholesky(&jet.g, d).ok_or(Error::NotPositiveDefinite)?;
        let g_inv = linalg::invert(&jet.g, d).ok_or(Error::NotPositiveDefinite)?;
        let dg = &jet.dg;
        let half = lit::<T>(0.5);
        let d3 = |a: usize, b: usize, c: usize| (a * d + b) * d + c;

        // Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut first = vec![T::zero(); d * d * d];
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    first[d3(l, i, j)] = half * (dg[d3(i, j, l)] + dg[d3(j, i, l)] - dg[d3(l, i, j)]);
                }
            }
        }
        let mut christoffel = vec![T::zero(); d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = T::zero();
                    for l in 0..d {
                        s = s + g_inv[k * d + l] * first[d3(l, i, j)];
                    }
                    christoffel[d3(k, i, j)] = s;
                }
            }
        }

        let curvature = jet.ddg.map(|ddg| {
            let d4 = |a: usize, b: usize, c: usize, e: usize| ((a * d + b) * d + c) * d + e;
            // ∂_m Γ^k_ij = g^{kl}(∂_m Γ_lij − ∂_m g_la Γ^a_ij)
            let mut dchristoffel = vec![T::zero(); d * d * d * d];
            let mut tmp = vec![T::zero(); d];
            for m in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        for l in 0..d {
                            let dfirst = half * (ddg[d4(m, i, j, l)] + ddg[d4(m, j, i, l)] - ddg[d4(m, l, i, j)]);
                            let mut corr = T::zero();
                            for a in 0..d {
                                corr = corr + dg[d3(m, l, a)] * christoffel[d3(a, i, j)];
                            }
                            tmp[l] = dfirst - corr;
                        }
                        for k in 0..d {
                            let mut s = T::zero();
                            for l in 0..d {
                                s = s + g_inv[k * d + l] * tmp[l];
                            }
                            dchristoffel[d4(m, k, i, j)] = s;
                        }
                    }
                }
            }
            let mut riemann = vec![T::zero(); d * d * d * d];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let mut s = dchristoffel[d4(i, l, j, k)] - dchristoffel[d4(j, l, i, k)];
                            for m in 0..d {
                                s = s + christoffel[d3(l, i, m)] * christoffel[d3(m, j, k)]
                                    - christoffel[d3(l, j, m)] * christoffel[d3(m, i, k)];
                            }
                            riemann[d4(i, j, k, l)] = s;
                        }
                    }
                }
            }
            let mut ricci = vec![T::zero(); d * d];
            for j in 0..d {
                for k in 0..d {
                    let mut s = T::zero();
                    for i in 0..d {
                        s = s + riemann[d4(i, j, k, i)];
                    }
                    ricci[j * d + k] = s;
                }
            }
            let scalar = (0..d * d).fold(T::zero(), |s, idx| s + g_inv[idx] * ricci[idx]);
            Curvature {
                ddg,
                dchristoffel,
                riemann,
                ricci,
                scalar,
            }
        });

        Ok(Self {
            dim: d,
            g: jet.g,
            g_inv,
            dg: jet.dg,
            christoffel,
            curvature,
        })
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> T {
        self.christoffel[(k * self.dim + i) * self.dim + j]
    }

    fn curv(&self) -> &Curvature<T> {
        self.curvature
            .as_ref()
            .expect("geometry jet was built without curvature")
    }

    /// `R_ijk^l`.
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let d = self.dim;
        self.curv().riemann[((i * d + j) * d + k) * d + l]
    }

    pub fn ricci(&self) -> &[T] {
        &self.curv().ricci
    }

    pub fn scalar(&self) -> T {
        self.curv().scalar
    }

    /// `∂_m Γ^k_ij`.
    pub fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> T {
        let d = self.dim;
        self.curv().dchristoffel[((m * d + k) * d + i) * d + j]
    }

    /// `(∇²u)_ij = ∂_i ∂_j u − Γ^k_ij ∂_k u`.
    pub fn covariant_hessian(&self, u: &Jet2<T>) -> Vec<T> {
        let d = self.dim;
        let mut h = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = u.dd(i, j);
                for k in 0..d {
                    s = s - self.gamma(k, i, j) * u.d(k);
                }
                h[i * d + j] = s;
            }
        }
        h
    }

    /// Laplace–Beltrami operator `g^{ij} (∇²u)_ij`.
    pub fn laplacian(&self, u: &Jet2<T>) -> T {
        self.trace(&self.covariant_hessian(u))
    }

    /// `g^{ij} a_ij` for a covariant 2-tensor.
    pub fn trace(&self, a: &[T]) -> T {
        (0..self.dim * self.dim).fold(T::zero(), |s, idx| s + self.g_inv[idx] * a[idx])
    }

    /// `g^{ij} ∂_i u ∂_j v`.
    pub fn inner_gradients(&self, u: &Jet2<T>, v: &Jet2<T>) -> T {
        let d = self.dim;
        let mut s = T::zero();
        for i in 0..d {
            for j in 0..d {
                s = s + self.g_inv[i * d + j] * u.d(i) * v.d(j);
            }
        }
        s
    }

    /// Full contraction `g^{ik} g^{jl} a_ij b_kl` of two covariant 2-tensors.
    pub fn pair(&self, a: &[T], b: &[T]) -> T {
        let d = self.dim;
        let raised = self.raise_both(b);
        (0..d * d).fold(T::zero(), |s, idx| s + a[idx] * raised[idx])
    }

    /// `g^{ik} g^{jl} b_kl`.
    pub fn raise_both(&self, b: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut tmp = vec![T::zero(); d * d];
        for i in 0..d {
            for l in 0..d {
                let mut s = T::zero();
                for k in 0..d {
                    s = s + self.g_inv[i * d + k] * b[k * d + l];
                }
                tmp[i * d + l] = s;
            }
        }
        let mut out = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = T::zero();
                for l in 0..d {
                    s = s + tmp[i * d + l] * self.g_inv[j * d + l];
                }
                out[i * d + j] = s;
            }
        }
        out
    }

    /// `sqrt(det g)`, the coordinate volume density.
    pub fn volume_density(&self) -> T {
        linalg::sqrt_det_spd(&self.g, self.dim).expect("metric checked positive definite")
    }

    /// `max_ij |Ric_ij − g_ij / (2τ)|`.
    pub fn einstein_residual(&self, tau: Tau<T>) -> T {
        let c = T::one() / (lit::<T>(2.0) * tau.0);
        self.ricci()
            .iter()
            .zip(&self.g)
            .fold(T::zero(), |m, (r, g)| m.max((*r - c * *g).abs()))
    }

    /// `max_ij |(g g⁻¹)_ij − δ_ij|`.
    pub fn inverse_residual(&self) -> T {
        let p = linalg::matmul(&self.g, &self.g_inv, self.dim);
        let id = linalg::identity::<T>(self.dim);
        crate::scalar::max_abs_diff(&p, &id)
    }
}

/// Shrinker scale τ with `Ric = g / (2τ)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tau<T>(pub T);

impl<T: Real> Tau<T> {
    /// First nonzero Laplace eigenvalue `1/τ`.
    pub fn eigenvalue(self) -> T {
        T::one() / self.0
    }
}

/// Metric and connection at `p`.
pub fn fs_metric_at<T: Real>(p: &ChartPoint<T>) -> GeometryJet<T> {
    GeometryJet::from_metric_jet(closed_form::fs_metric_jet(p.coords(), false))
        .expect("Fubini-Study metric is positive definite in every chart")
}

/// Metric, connection and curvature at `p`.
pub fn curvature_at<T: Real>(p: &ChartPoint<T>) -> GeometryJet<T> {
    GeometryJet::from_metric_jet(closed_form::fs_metric_jet(p.coords(), true))
        .expect("Fubini-Study metric is positive definite in every chart")
}

/// Number of sample points [`einstein_tau`] checks.
pub const TAU_SAMPLE_POINTS: usize = 24;
/// Allowed spread of `n/(2R)` across sample points.
pub const TAU_CONSTANCY_TOL: f64 = 1e-9;
const TAU_SEED: u64 = 0x7a75_5eed;

/// `τ = n/(2R)` from sampled scalar curvature, checked constant.
pub fn einstein_tau<T: Real>(n: usize) -> Result<Tau<T>> {
    if n == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let real_dim = count::<T>(2 * n);
    let points = sampling::chart_points(n, TAU_SAMPLE_POINTS, TAU_SEED, sampling::SAMPLE_RADIUS);
    let taus: Vec<T> = points
        .iter()
        .map(|p| real_dim / (lit::<T>(2.0) * curvature_at(&p.cast::<T>()).scalar()))
        .collect();
    let lo = taus.iter().copied().fold(T::infinity(), T::min);
    let hi = taus.iter().copied().fold(T::neg_infinity(), T::max);
    let spread = (hi - lo).to_f64().unwrap();
    let tol = TAU_CONSTANCY_TOL.max(1e3 * T::epsilon().to_f64().unwrap());
    if spread > tol {
        return Err(Error::CurvatureNotConstant { spread, tol });
    }
    Ok(Tau(taus[0]))
}

/// Re-expresses `p` in chart `target`.
pub fn transition_map<T: Real>(p: &ChartPoint<T>, target: usize) -> Result<ChartPoint<T>> {
    ChartPoint::from_homogeneous(&p.homogeneous(), target)
}

/// Real Jacobian `∂ w'_α / ∂ w_β` of the transition map at `p`, row-major
/// with the target coordinate as row.
pub fn transition_jacobian<T: Real>(p: &ChartPoint<T>, target: usize) -> Result<Vec<T>> {
    let n = p.complex_dim();
    let d = 2 * n;
    let vars = Jet2::seed(p.coords());
    let mut z: Vec<(Jet2<T>, Jet2<T>)> = Vec::with_capacity(n + 1);
    let mut k = 0;
    for slot in 0..=n {
        if slot == p.chart() {
            z.push((Jet2::constant(T::one()), Jet2::constant(T::zero())));
        } else {
            z.push((vars[2 * k].clone(), vars[2 * k + 1].clone()));
            k += 1;
        }
    }
    let (pr, pi) = z[target].clone();
    let den = pr.clone() * pr.clone() + pi.clone() * pi.clone();
    if den.value == T::zero() {
        return Err(Error::OutsideChart { target });
    }
    let mut jac = Vec::with_capacity(d * d);
    for (slot, (a, b)) in z.iter().enumerate() {
        if slot == target {
            continue;
        }
        let re = (a.clone() * pr.clone() + b.clone() * pi.clone()) / den.clone();
        let im = (b.clone() * pr.clone() - a.clone() * pi.clone()) / den.clone();
        jac.extend((0..d).map(|j| re.d(j)));
        jac.extend((0..d).map(|j| im.d(j)));
    }
    Ok(jac)
}

/// `max |Jᵀ g_target J − g_source|` for the transition from `p`'s chart to `target`.
pub fn pullback_mismatch<T: Real>(p: &ChartPoint<T>, target: usize) -> Result<T> {
    let q = transition_map(p, target)?;
    let jac = transition_jacobian(p, target)?;
    let d = p.real_dim();
    let gq = fs_metric_at(&q).g;
    let gp = fs_metric_at(p).g;
    let mut worst = T::zero();
    for i in 0..d {
        for j in 0..d {
            let mut s = T::zero();
            for a in 0..d {
                for b in 0..d {
                    s = s + jac[a * d + i] * gq[a * d + b] * jac[b * d + j];
                }
            }
            worst = worst.max((s - gp[i * d + j]).abs());
        }
    }
    Ok(worst)
}
