//! Stability operators of the shrinker entropy ν at the Fubini–Study metric
//! and the variations of ν along `h = ψ g`, `ψ` a first eigenfunction.
//!
//! ν is never evaluated directly. Every quantity here is one of the
//! variation formulas, assembled in chart coordinates and integrated by
//! chart quadrature, with exact sphere moments as the second path where one
//! exists.

use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::closed_form::real_metric;
use crate::geometry::{curvature_at, einstein_tau, fs_metric_at, ChartPoint, GeometryJet, Tau};
use crate::jet::Jet2;
use crate::linalg;
use crate::moments::{cpn_average, cpn_volume_closed_form};
use crate::polynomial::{int, ExactRational, Rational};
use crate::quadrature::{integrate_cpn, QuadratureOptions, QuadratureResult};
use crate::sampling;
use crate::spectral::{special_phi, verify_eigen, EigenFunction, HermitianForm};
use crate::variation::family_epsilon;

/// Eigen-residual below which `ψ` counts as a first eigenfunction.
pub const EIGEN_TOL: f64 = 1e-8;
/// Threshold for `|ν″|` in [`certify`].
pub const SECOND_VARIATION_TOL: f64 = 1e-7;
/// Lower bound for `|ν‴|` in [`certify`].
pub const THIRD_VARIATION_MIN: f64 = 1e-3;
/// Relative agreement required between the exact and quadrature `∫φ³`.
pub const PATH_AGREEMENT_TOL: f64 = 1e-5;
/// Absolute quadrature tolerance for integrands that vanish identically.
pub const VANISHING_ABS_TOL: f64 = 1e-10;
/// s-step for the finite difference of `H̄(s)`.
pub const HBAR_FD_STEP: f64 = 1e-2;

/// `h = ψ g_FS` on CP^N.
#[derive(Clone, Debug)]
pub struct ConformalPerturbation {
    n: usize,
    psi: EigenFunction<f64>,
    tau: Tau<f64>,
}

impl ConformalPerturbation {
    /// Checks `ψ` against the eigen-equation at 24 seeded points.
    pub fn new(form: HermitianForm) -> Result<Self> {
        let h = Self::unchecked(form)?;
        let points = sampling::chart_points(h.n, 24, 0x5eed, sampling::SAMPLE_RADIUS);
        let residual = verify_eigen(h.psi.form(), h.tau, &points);
        if !(residual < EIGEN_TOL) {
            return Err(Error::EigenResidual {
                residual,
                tol: EIGEN_TOL,
            });
        }
        Ok(h)
    }

    /// No eigen check. Only for testing the plumbing with non-eigen `ψ`.
    pub fn unchecked(form: HermitianForm) -> Result<Self> {
        let n = form.complex_dim();
        let tau = einstein_tau::<f64>(n)?;
        Ok(Self {
            n,
            psi: EigenFunction::new(form),
            tau,
        })
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn tau(&self) -> Tau<f64> {
        self.tau
    }

    pub fn psi(&self) -> &EigenFunction<f64> {
        &self.psi
    }

    pub fn form(&self) -> &HermitianForm {
        self.psi.form()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self {
            n: self.n,
            psi: EigenFunction::new(self.form().scale(c)),
            tau: self.tau,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            psi: EigenFunction::new(self.form().add(other.form())),
            tau: self.tau,
        }
    }

    /// `H̄ = (∫ tr h dV) / V = n · avg ψ`, exactly.
    pub fn mean_trace(&self) -> Result<Rational> {
        Ok(cpn_average(1, self.form())? * int(self.real_dim() as i64))
    }

    /// Entries of `h_ij` as coordinate jets.
    pub fn h_jets(&self, p: &ChartPoint<f64>) -> Vec<Jet2<f64>> {
        let seeds = Jet2::seed(p.coords());
        let psi = self.psi.jet_at(p.chart(), &seeds);
        real_metric(&seeds).into_iter().map(|g| g * psi.clone()).collect()
    }
}

/// `v_h` for a conformal perturbation: `v = 2ψ`.
#[derive(Clone, Debug)]
pub struct VField {
    psi: EigenFunction<f64>,
}

impl VField {
    pub fn jet(&self, p: &ChartPoint<f64>) -> Jet2<f64> {
        self.psi.jet(p).scale(2.0)
    }

    pub fn value(&self, p: &ChartPoint<f64>) -> f64 {
        2.0 * self.psi.value(p)
    }
}

/// `v_h = 2ψ`, after checking `ψ` is an eigenfunction.
pub fn v_of(h: &ConformalPerturbation) -> Result<VField> {
    let points = sampling::chart_points(h.n, 24, 0x5eed, sampling::SAMPLE_RADIUS);
    let residual = verify_eigen(h.form(), h.tau, &points);
    if !(residual < EIGEN_TOL) {
        return Err(Error::EigenResidual {
            residual,
            tol: EIGEN_TOL,
        });
    }
    Ok(VField { psi: h.psi.clone() })
}

/// `max_p |(Δ + 1/(2τ)) v − ∇^k∇^l h_lk|` with `v = 2ψ`.
pub fn v_equation_residual(h: &ConformalPerturbation, points: &[ChartPoint<f64>]) -> Result<f64> {
    let v = v_of(h)?;
    let inv2tau = 0.5 / h.tau.0;
    Ok(points
        .par_iter()
        .map(|p| {
            let geo = curvature_at(p);
            let lhs = geo.laplacian(&v.jet(p)) + inv2tau * v.value(p);
            let rhs = double_divergence(&geo, &h.h_jets(p));
            (lhs - rhs).abs()
        })
        .reduce(|| 0.0, f64::max))
}

/// First and second covariant derivatives of a covariant 2-tensor given by
/// coordinate jets of its entries. Layouts: `nabla[(k*d+i)*d+j] = ∇_k h_ij`,
/// `nabla2[((l*d+k)*d+i)*d+j] = ∇_l∇_k h_ij`.
pub fn tensor_derivatives(geo: &GeometryJet<f64>, h: &[Jet2<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = geo.dim;
    let (d2, d3) = (d * d, d * d * d);
    let dgam = &geo
        .curvature
        .as_ref()
        .expect("geometry jet was built without curvature")
        .dchristoffel;
    // Copies with the summed index m last, so every inner sum is a dot
    // product of contiguous rows.
    let mut gam_t = vec![0.0; d3]; // Γ^m_ki at (k, i, m)
    let mut dgam_t = vec![0.0; d3 * d]; // ∂_l Γ^m_ki at (l, k, i, m)
    for m in 0..d {
        for ki in 0..d2 {
            gam_t[ki * d + m] = geo.christoffel[m * d2 + ki];
            for l in 0..d {
                dgam_t[(l * d2 + ki) * d + m] = dgam[l * d3 + m * d2 + ki];
            }
        }
    }
    let mut hv_t = vec![0.0; d2]; // h_mj at (j, m)
    let mut dh_t = vec![0.0; d3]; // ∂_l h_mj at (l, j, m)
    for m in 0..d {
        for j in 0..d {
            let x = &h[m * d + j];
            hv_t[j * d + m] = x.value;
            for l in 0..d {
                dh_t[(l * d + j) * d + m] = x.d(l);
            }
        }
    }
    fn row_of(v: &[f64], start: usize, d: usize) -> &[f64] {
        &v[start * d..start * d + d]
    }
    let row = |v, start| row_of(v, start, d);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut nabla = vec![0.0; d3];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                nabla[k * d2 + i * d + j] = h[i * d + j].d(k)
                    - dot(row(&gam_t, k * d + i), row(&hv_t, j))
                    - dot(row(&gam_t, k * d + j), row(&hv_t, i));
            }
        }
    }
    // ∇_k h_mj at (k, i, j) -> (i, j, m) and (k, j, m) layouts
    let mut n_ijm = vec![0.0; d3]; // ∇_m h_ij at (i, j, m)
    let mut n_kjm = vec![0.0; d3 * d]; // ∇_k h_mj at (k, j, m)
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let v = nabla[k * d2 + i * d + j];
                n_ijm[(i * d + j) * d + k] = v;
                n_kjm[(k * d + j) * d + i] = v;
            }
        }
    }
    let mut nabla2 = vec![0.0; d3 * d];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    // ∂_l(∇_k h_ij)
                    let mut s = h[i * d + j].dd(l, k);
                    s -= dot(row(&dgam_t, (l * d + k) * d + i), row(&hv_t, j))
                        + dot(row(&gam_t, k * d + i), row(&dh_t, l * d + j));
                    s -= dot(row(&dgam_t, (l * d + k) * d + j), row(&hv_t, i))
                        + dot(row(&gam_t, k * d + j), row(&dh_t, l * d + i));
                    s -= dot(row(&gam_t, l * d + k), row(&n_ijm, i * d + j))
                        + dot(row(&gam_t, l * d + i), row(&n_kjm, k * d + j))
                        + dot(row(&gam_t, l * d + j), &nabla[k * d2 + i * d..k * d2 + i * d + d]);
                    nabla2[l * d3 + k * d2 + i * d + j] = s;
                }
            }
        }
    }
    (nabla, nabla2)
}

/// `∇^k∇^l h_lk`.
pub fn double_divergence(geo: &GeometryJet<f64>, h: &[Jet2<f64>]) -> f64 {
    let d = geo.dim;
    let (_, nabla2) = tensor_derivatives(geo, h);
    let mut s = 0.0;
    for k in 0..d {
        for a in 0..d {
            for l in 0..d {
                for b in 0..d {
                    s += geo.g_inv[k * d + a] * geo.g_inv[l * d + b] * nabla2[((a * d + b) * d + l) * d + k];
                }
            }
        }
    }
    s
}

/// Which terms of `Ñ` to assemble. Dropping one is how the tests confirm
/// each term is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NTildeTerms {
    pub laplacian: bool,
    pub curvature: bool,
    pub divergence: bool,
    pub hessian_v: bool,
}

impl Default for NTildeTerms {
    fn default() -> Self {
        Self {
            laplacian: true,
            curvature: true,
            divergence: true,
            hessian_v: true,
        }
    }
}

/// `Ñ(h)_ij = ½(Δh)_ij + R_kij^l g^{km} h_ml − ½ g^{kl}(∇_i∇_l h_kj + ∇_j∇_l h_ki) + ½∇_i∇_j v`
/// with `v = 2ψ`.
pub fn n_tilde_terms_at(h: &ConformalPerturbation, p: &ChartPoint<f64>, terms: NTildeTerms) -> Vec<f64> {
    let geo = curvature_at(p);
    let d = geo.dim;
    let hj = h.h_jets(p);
    let (_, nabla2) = tensor_derivatives(&geo, &hj);
    let i4 = |a: usize, b: usize, c: usize, e: usize| ((a * d + b) * d + c) * d + e;
    let v_hess = geo.covariant_hessian(&h.psi.jet(p).scale(2.0));
    let rm = &geo.curvature.as_ref().expect("curvature requested").riemann;
    // (g⁻¹h)^k_l
    let mut gh = vec![0.0; d * d];
    for k in 0..d {
        for l in 0..d {
            gh[k * d + l] = (0..d).map(|m| geo.g_inv[k * d + m] * hj[m * d + l].value).sum();
        }
    }
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                for l in 0..d {
                    let gkl = geo.g_inv[k * d + l];
                    if terms.laplacian {
                        s += 0.5 * gkl * nabla2[i4(k, l, i, j)];
                    }
                    if terms.divergence {
                        s -= 0.5 * gkl * (nabla2[i4(i, l, k, j)] + nabla2[i4(j, l, k, i)]);
                    }
                    if terms.curvature {
                        s += rm[i4(k, i, j, l)] * gh[k * d + l];
                    }
                }
            }
            if terms.hessian_v {
                s += 0.5 * v_hess[i * d + j];
            }
            out[i * d + j] = s;
        }
    }
    out
}

pub fn n_tilde_at(h: &ConformalPerturbation, p: &ChartPoint<f64>) -> Vec<f64> {
    n_tilde_terms_at(h, p, NTildeTerms::default())
}

/// `N(h) = Ñ(h) − (H̄ / 2nτ) g`.
pub fn n_operator_at(h: &ConformalPerturbation, p: &ChartPoint<f64>) -> Result<Vec<f64>> {
    let hbar = h.mean_trace()?.to_f64().unwrap();
    let c = hbar / (2.0 * h.real_dim() as f64 * h.tau.0);
    let g = real_metric(p.coords());
    Ok(n_tilde_at(h, p)
        .into_iter()
        .zip(g)
        .map(|(a, gij)| a - c * gij)
        .collect())
}

/// Maximum entries of the two pieces of `Ñ(ψ g)` once it is reduced with
/// `Ric = g/(2τ)`: `½(Δψ + ψ/τ) g` and `∇²(v/2 − ψ)`.
pub fn n_tilde_decomposition_at(h: &ConformalPerturbation, p: &ChartPoint<f64>) -> (f64, f64) {
    let geo = curvature_at(p);
    let u = h.psi.jet(p);
    let eigen = 0.5 * (geo.laplacian(&u) + u.value / h.tau.0);
    let eigen_max = geo.g.iter().fold(0.0f64, |m, g| m.max((eigen * g).abs()));
    let v = VField { psi: h.psi.clone() };
    let rest = v.jet(p).scale(0.5) - u;
    let hess_max = geo.covariant_hessian(&rest).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (eigen_max, hess_max)
}

/// Quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstVariations {
    /// `τ′ = τ ∫⟨Ric, h⟩ dV / ∫R dV`.
    pub tau_prime: Estimate,
    /// `V′ = (n/2) ∫ψ dV`.
    pub volume_prime: Estimate,
    /// `n(n−2)/(2V) ‖ψ‖²` with `‖ψ‖²/V` from exact moments.
    pub hbar_prime_exact: f64,
    /// Same formula with `‖ψ‖²` and `V` from quadrature.
    pub hbar_prime_closed: Estimate,
    /// Central difference in `s` of `H̄(s)` along `(1 + sψ) g`.
    pub hbar_prime_fd: f64,
    pub psi_norm_sq: Estimate,
    pub volume: Estimate,
}

/// First variations of `τ`, `V` and `H̄`. `H̄(s)` is recomputed from the
/// metric `(1 + sψ) g` at every quadrature node for the difference quotient.
pub fn first_variations(h: &ConformalPerturbation, opts: QuadratureOptions) -> Result<FirstVariations> {
    let n = h.real_dim();
    let nf = n as f64;
    let step = HBAR_FD_STEP;
    if 2.0 * step >= family_epsilon(h.form()) {
        return Err(Error::StepTooLarge { step });
    }
    let nodes = [-2.0 * step, -step, step, 2.0 * step];
    let psi = &h.psi;
    let opts = QuadratureOptions {
        abs_tol: opts.abs_tol.max(VANISHING_ABS_TOL),
        ..opts
    };
    // Curvature terms [⟨Ric,h⟩, R] in their own pass: they converge at a low
    // level and cost far more per node than the rest.
    let rc = integrate_cpn(h.n, 2, opts, |p| {
        let geo = curvature_at(p);
        let hv: Vec<f64> = geo.g.iter().map(|g| g * psi.value(p)).collect();
        vec![geo.pair(geo.ricci(), &hv), geo.scalar()]
    })?;
    // [ψ, ψ², 1, (H(s)·ρ(s), ρ(s)) for each s]
    let rest = integrate_cpn(h.n, 3 + 2 * nodes.len(), opts, |p| {
        let geo = fs_metric_at(p);
        let val = psi.value(p);
        let hv: Vec<f64> = geo.g.iter().map(|g| g * val).collect();
        let mut out = vec![val, val * val, 1.0];
        for s in nodes {
            let gs: Vec<f64> = geo.g.iter().map(|g| g * (1.0 + s * val)).collect();
            let gs_inv = linalg::invert(&gs, n).expect("family metric invertible");
            let ratio = linalg::sqrt_det_spd(&gs, n).expect("family metric positive") / geo.volume_density();
            let trace: f64 = gs_inv.iter().zip(&hv).map(|(a, b)| a * b).sum();
            out.push(trace * ratio);
            out.push(ratio);
        }
        out
    })?;
    let r = QuadratureResult {
        values: rc.values.iter().chain(&rest.values).copied().collect(),
        errors: rc.errors.iter().chain(&rest.errors).copied().collect(),
        level: rc.level.max(rest.level),
        nodes: rc.nodes + rest.nodes,
    };
    let est = |i: usize| Estimate {
        value: r.values[i],
        error: r.errors[i],
    };
    let tau = h.tau.0;
    let tau_prime = Estimate {
        value: tau * r.values[0] / r.values[1],
        error: tau * (r.errors[0] + r.errors[1] * (r.values[0] / r.values[1]).abs()) / r.values[1].abs(),
    };
    let volume_prime = Estimate {
        value: 0.5 * nf * r.values[2],
        error: 0.5 * nf * r.errors[2],
    };
    let psi_norm_sq = est(3);
    let volume = est(4);
    let avg_sq = cpn_average(2, h.form())?.to_f64().unwrap();
    let factor = nf * (nf - 2.0) / 2.0;
    let hbar_prime_exact = factor * avg_sq;
    let ratio = psi_norm_sq.value / volume.value;
    let hbar_prime_closed = Estimate {
        value: factor * ratio,
        error: factor * (psi_norm_sq.error + ratio * volume.error) / volume.value,
    };
    let hbar = |k: usize| r.values[5 + 2 * k] / r.values[6 + 2 * k];
    let fine = (hbar(2) - hbar(1)) / (2.0 * step);
    let coarse = (hbar(3) - hbar(0)) / (4.0 * step);
    let hbar_prime_fd = (4.0 * fine - coarse) / 3.0;
    Ok(FirstVariations {
        tau_prime,
        volume_prime,
        hbar_prime_exact,
        hbar_prime_closed,
        hbar_prime_fd,
        psi_norm_sq,
        volume,
    })
}

/// `ν″ = (τ/V) ∫⟨N(h), h⟩ dV`, with `V` in closed form.
pub fn second_variation(h: &ConformalPerturbation, opts: QuadratureOptions) -> Result<Estimate> {
    let hbar = h.mean_trace()?.to_f64().unwrap();
    let c = hbar / (2.0 * h.real_dim() as f64 * h.tau.0);
    let opts = QuadratureOptions {
        abs_tol: opts.abs_tol.max(VANISHING_ABS_TOL),
        ..opts
    };
    let r = integrate_cpn(h.n, 1, opts, |p| {
        let geo = curvature_at(p);
        let psi = h.psi.value(p);
        let hv: Vec<f64> = geo.g.iter().map(|g| g * psi).collect();
        let nt: Vec<f64> = n_tilde_at(h, p)
            .into_iter()
            .zip(&geo.g)
            .map(|(a, g)| a - c * g)
            .collect();
        vec![geo.pair(&nt, &hv)]
    })?;
    let scale = h.tau.0 / cpn_volume_closed_form(h.n);
    Ok(Estimate {
        value: scale * r.value(),
        error: scale * r.error(),
    })
}

/// `ν‴ = (n−2)(4πτ)^{−n/2} ∫ψ³ dV` by both paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThirdVariation {
    /// Sphere average of `ψ³`.
    pub cube_average: ExactRational,
    /// `q` with `∫ψ³ dV = q π^N`.
    pub cube_integral_pi_coefficient: ExactRational,
    pub cube_integral_exact: f64,
    pub cube_integral_quadrature: Estimate,
    /// `(4πτ)^{−n/2}`.
    pub prefactor: f64,
    pub value_exact: f64,
    pub value_quadrature: f64,
    pub relative_path_gap: f64,
    pub volume: f64,
    /// `V / (4πτ)^{n/2}`: the ratio between the `τ/V` and `τ(4πτ)^{−n/2}`
    /// normalizations of the measure.
    pub measure_ratio: f64,
    /// `ν‴` with the unit-mass measure `dV/V`: `(n−2) ∫ψ³ dV / V`.
    pub value_unit_mass: f64,
}

pub fn third_variation_for(h: &ConformalPerturbation, opts: QuadratureOptions) -> Result<ThirdVariation> {
    let nn = h.n;
    let n = h.real_dim() as f64;
    let avg = cpn_average(3, h.form())?;
    let fact: i64 = (1..=nn as i64).product();
    let pi_coeff = &avg / int(fact);
    let volume = cpn_volume_closed_form(nn);
    let exact = avg.to_f64().unwrap() * volume;
    let psi = &h.psi;
    let q = integrate_cpn(nn, 1, opts, |p| vec![psi.value(p).powi(3)])?;
    let prefactor = (4.0 * PI * h.tau.0).powf(-n / 2.0);
    let value_exact = (n - 2.0) * prefactor * exact;
    let value_quadrature = (n - 2.0) * prefactor * q.value();
    let gap = if value_exact == 0.0 {
        (value_quadrature - value_exact).abs()
    } else {
        ((value_quadrature - value_exact) / value_exact).abs()
    };
    Ok(ThirdVariation {
        cube_average: ExactRational(avg),
        cube_integral_pi_coefficient: ExactRational(pi_coeff),
        cube_integral_exact: exact,
        cube_integral_quadrature: Estimate {
            value: q.value(),
            error: q.error(),
        },
        prefactor,
        value_exact,
        value_quadrature,
        relative_path_gap: gap,
        volume,
        measure_ratio: volume * prefactor,
        value_unit_mass: (n - 2.0) * exact / volume,
    })
}

/// [`third_variation_for`] the special eigenfunction on CP^N.
pub fn third_variation(nn: usize, opts: QuadratureOptions) -> Result<ThirdVariation> {
    third_variation_for(&ConformalPerturbation::new(special_phi(nn)?)?, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotLocalMax,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Quadrature,
    Both,
    Pointwise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: f64,
    pub points: usize,
    pub eigen_residual: CertifiedValue,
    pub v_residual: CertifiedValue,
    pub n_tilde_max: CertifiedValue,
    pub tau_prime: CertifiedValue,
    pub volume_prime: CertifiedValue,
    pub hbar_prime: CertifiedValue,
    pub hbar_prime_fd: CertifiedValue,
    pub second_variation: CertifiedValue,
    pub second_variation_error: f64,
    pub third_variation: CertifiedValue,
    pub third: ThirdVariation,
    pub phi3_integral: CertifiedValue,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub points: usize,
    pub seed: u64,
    pub quadrature: QuadratureOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            points: 100,
            seed: 7,
            quadrature: QuadratureOptions::default(),
        }
    }
}

/// Runs every stage for the special eigenfunction on CP^N and decides the
/// verdict: `not_local_max` iff the eigen-residual is below
/// [`EIGEN_TOL`], `|ν″| <` [`SECOND_VARIATION_TOL`] and `|ν‴| >`
/// [`THIRD_VARIATION_MIN`] with both `∫φ³` paths agreeing.
pub fn certify(nn: usize, opts: &CertifyOptions) -> Result<StabilityCertificate> {
    let form = special_phi(nn)?;
    if opts.points == 0 {
        return Err(Error::Invalid("points must be at least 1".into()));
    }
    let h = ConformalPerturbation::unchecked(form)?;
    let tau = h.tau;
    let points = sampling::chart_points(nn, opts.points, opts.seed, sampling::SAMPLE_RADIUS);
    let mut diagnostics = Vec::new();

    let eigen_residual = verify_eigen(h.form(), tau, &points);
    if !(eigen_residual < EIGEN_TOL) {
        diagnostics.push(format!("eigen residual {eigen_residual:e} >= {EIGEN_TOL:e}"));
    }
    let v_residual = match v_equation_residual(&h, &points) {
        Ok(r) => r,
        Err(e) => {
            diagnostics.push(e.to_string());
            f64::INFINITY
        }
    };
    let n_tilde_max = points
        .par_iter()
        .map(|p| n_tilde_at(&h, p).iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .reduce(|| 0.0, f64::max);
    let first = first_variations(&h, opts.quadrature)?;
    let second = second_variation(&h, opts.quadrature)?;
    if !(second.value.abs() < SECOND_VARIATION_TOL) {
        diagnostics.push(format!(
            "|second variation| {:e} >= {SECOND_VARIATION_TOL:e}",
            second.value.abs()
        ));
    }
    let third = third_variation_for(&h, opts.quadrature)?;
    if !(third.value_exact.abs() > THIRD_VARIATION_MIN) {
        diagnostics.push(format!(
            "|third variation| {:e} <= {THIRD_VARIATION_MIN:e}",
            third.value_exact.abs()
        ));
    }
    if !(third.relative_path_gap < PATH_AGREEMENT_TOL) {
        diagnostics.push(format!(
            "exact and quadrature third variation differ by {:e} (relative)",
            third.relative_path_gap
        ));
    }
    let verdict = if diagnostics.is_empty() {
        Verdict::NotLocalMax
    } else {
        Verdict::Inconclusive
    };
    let cv = |value: f64, provenance| CertifiedValue { value, provenance };
    Ok(StabilityCertificate {
        n: nn,
        tau: tau.0,
        points: opts.points,
        eigen_residual: cv(eigen_residual, Provenance::Pointwise),
        v_residual: cv(v_residual, Provenance::Pointwise),
        n_tilde_max: cv(n_tilde_max, Provenance::Pointwise),
        tau_prime: cv(first.tau_prime.value, Provenance::Quadrature),
        volume_prime: cv(first.volume_prime.value, Provenance::Quadrature),
        hbar_prime: cv(first.hbar_prime_exact, Provenance::Exact),
        hbar_prime_fd: cv(first.hbar_prime_fd, Provenance::Quadrature),
        second_variation: cv(second.value, Provenance::Quadrature),
        second_variation_error: second.error,
        third_variation: cv(third.value_exact, Provenance::Both),
        phi3_integral: cv(third.cube_integral_exact, Provenance::Both),
        third,
        verdict,
        diagnostics,
    })
}

/// The factor `c` in `f′ = c φ`, from `v = −2f′ + H` with `v = 2φ` and
/// `H = nφ`: `c = (n − 2)/2`.
pub fn f_prime_coefficient(n: i64) -> Rational {
    (int(n) - int(2)) / int(2)
}

#[cfg(test)]
mod tests;
