//! s-derivatives of geometric quantities along `g(s) = (1 + sφ) g_FS`.
//!
//! Every closed-form variation is a list of tensor terms built from
//! background data at `s = 0`, each with a coefficient `a + b·n` in the real
//! dimension `n`. Keeping the coefficients explicit lets the suite perturb
//! any single one and confirm the finite-difference oracle notices.
//!
//! Two oracles audit the closed forms:
//! - central differences in `s` of the geometry of `g(s)` computed from
//!   scratch, with one Richardson step;
//! - the classical conformal-change formulas for `e^{2σ} g`,
//!   `σ = ½ log(1 + sφ)`, at fixed `s`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::closed_form::real_metric;
use crate::geometry::{curvature_at, einstein_tau, fs_metric_at, ChartPoint, GeometryJet, MetricJet, Tau};
use crate::jet::Jet2;
use crate::sampling;
use crate::scalar::{count, lit, Real};
use crate::spectral::{special_phi, EigenFunction, HermitianForm};

/// Geometric quantity whose s-derivative is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Inverse,
    Christoffel,
    Riemann,
    Scalar,
    VolumeDensity,
    Laplacian,
    Ricci,
}

impl Quantity {
    /// Number of components in a `d`-dimensional chart frame.
    pub fn len(self, d: usize) -> usize {
        match self {
            Quantity::Inverse | Quantity::Ricci => d * d,
            Quantity::Christoffel => d * d * d,
            Quantity::Riemann => d * d * d * d,
            Quantity::Scalar | Quantity::VolumeDensity | Quantity::Laplacian => 1,
        }
    }

    /// The quantity read off a geometry jet. `u` is the fixed test function
    /// the Laplacian acts on.
    pub fn evaluate<T: Real>(self, geo: &GeometryJet<T>, u: &Jet2<T>) -> Vec<T> {
        match self {
            Quantity::Inverse => geo.g_inv.clone(),
            Quantity::Christoffel => geo.christoffel.clone(),
            Quantity::Riemann => geo.curvature.as_ref().expect("curvature").riemann.clone(),
            Quantity::Scalar => vec![geo.scalar()],
            Quantity::VolumeDensity => vec![geo.volume_density()],
            Quantity::Laplacian => vec![geo.laplacian(u)],
            Quantity::Ricci => geo.ricci().to_vec(),
        }
    }
}

/// The ten variation formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FormulaId {
    #[serde(rename = "inverse'")]
    InverseFirst,
    #[serde(rename = "christoffel'")]
    ChristoffelFirst,
    #[serde(rename = "riemann'")]
    RiemannFirst,
    #[serde(rename = "scalar'")]
    ScalarFirst,
    #[serde(rename = "volume_density'")]
    VolumeFirst,
    #[serde(rename = "laplacian'")]
    LaplacianFirst,
    #[serde(rename = "inverse''")]
    InverseSecond,
    #[serde(rename = "christoffel''")]
    ChristoffelSecond,
    #[serde(rename = "laplacian''")]
    LaplacianSecond,
    #[serde(rename = "ricci''")]
    RicciSecond,
}

impl FormulaId {
    pub const ALL: [FormulaId; 10] = [
        FormulaId::InverseFirst,
        FormulaId::ChristoffelFirst,
        FormulaId::RiemannFirst,
        FormulaId::ScalarFirst,
        FormulaId::VolumeFirst,
        FormulaId::LaplacianFirst,
        FormulaId::InverseSecond,
        FormulaId::ChristoffelSecond,
        FormulaId::LaplacianSecond,
        FormulaId::RicciSecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::InverseFirst => "inverse'",
            FormulaId::ChristoffelFirst => "christoffel'",
            FormulaId::RiemannFirst => "riemann'",
            FormulaId::ScalarFirst => "scalar'",
            FormulaId::VolumeFirst => "volume_density'",
            FormulaId::LaplacianFirst => "laplacian'",
            FormulaId::InverseSecond => "inverse''",
            FormulaId::ChristoffelSecond => "christoffel''",
            FormulaId::LaplacianSecond => "laplacian''",
            FormulaId::RicciSecond => "ricci''",
        }
    }

    pub fn quantity(self) -> Quantity {
        match self {
            FormulaId::InverseFirst | FormulaId::InverseSecond => Quantity::Inverse,
            FormulaId::ChristoffelFirst | FormulaId::ChristoffelSecond => Quantity::Christoffel,
            FormulaId::RiemannFirst => Quantity::Riemann,
            FormulaId::ScalarFirst => Quantity::Scalar,
            FormulaId::VolumeFirst => Quantity::VolumeDensity,
            FormulaId::LaplacianFirst | FormulaId::LaplacianSecond => Quantity::Laplacian,
            FormulaId::RicciSecond => Quantity::Ricci,
        }
    }

    pub fn order(self) -> u8 {
        match self {
            FormulaId::InverseFirst
            | FormulaId::ChristoffelFirst
            | FormulaId::RiemannFirst
            | FormulaId::ScalarFirst
            | FormulaId::VolumeFirst
            | FormulaId::LaplacianFirst => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Coefficient `constant + slope·n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub constant: f64,
    pub slope: f64,
}

impl Affine {
    pub const fn new(constant: f64, slope: f64) -> Self {
        Self { constant, slope }
    }

    pub const fn c(constant: f64) -> Self {
        Self { constant, slope: 0.0 }
    }

    pub fn at(self, n: usize) -> f64 {
        self.constant + self.slope * n as f64
    }
}

/// Tensor building blocks. Index names follow the quantity's layout:
/// `(i, j)` for 2-tensors, `(k, i, j)` for `Γ^k_ij`, `(i, j, k, l)` for `R_ijk^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// `φ g^{ij}`
    PhiInverse,
    /// `φ² g^{ij}`
    PhiSqInverse,
    /// `∇_iφ δ^k_j`
    GradIDeltaKJ,
    /// `∇_jφ δ^k_i`
    GradJDeltaKI,
    /// `∇^kφ g_ij`
    GradUpKMetricIJ,
    /// `φ ∇_iφ δ^k_j`
    PhiGradIDeltaKJ,
    /// `φ ∇_jφ δ^k_i`
    PhiGradJDeltaKI,
    /// `φ ∇^kφ g_ij`
    PhiGradUpKMetricIJ,
    /// `∇_i∇_kφ δ^l_j`
    HessIKDeltaLJ,
    /// `∇_j∇_kφ δ^l_i`
    HessJKDeltaLI,
    /// `∇_j∇^lφ g_ik`
    HessJUpLMetricIK,
    /// `∇_i∇^lφ g_jk`
    HessIUpLMetricJK,
    /// `Δφ`
    LapPhi,
    /// `φ / τ`
    PhiOverTau,
    /// `φ sqrt(det g)`
    PhiDensity,
    /// `φ Δu`
    PhiLapU,
    /// `⟨∇φ, ∇u⟩`
    GradPhiGradU,
    /// `φ² Δu`
    PhiSqLapU,
    /// `φ ⟨∇φ, ∇u⟩`
    PhiGradPhiGradU,
    /// `φ Δφ g_ij`
    PhiLapPhiMetric,
    /// `|∇φ|² g_ij`
    GradSqMetric,
    /// `φ ∇_i∇_jφ`
    PhiHess,
    /// `∇_iφ ∇_jφ`
    GradGrad,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: Affine,
    pub kind: TermKind,
}

const fn term(constant: f64, slope: f64, kind: TermKind) -> Term {
    Term {
        coefficient: Affine::new(constant, slope),
        kind,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Formula {
    pub id: FormulaId,
    pub terms: Vec<Term>,
}

/// The variation formulas for `h = φ g`, `u′ = 0`.
pub fn formula(id: FormulaId) -> Formula {
    use TermKind::*;
    let terms = match id {
        FormulaId::InverseFirst => vec![term(-1.0, 0.0, PhiInverse)],
        FormulaId::ChristoffelFirst => vec![
            term(0.5, 0.0, GradIDeltaKJ),
            term(0.5, 0.0, GradJDeltaKI),
            term(-0.5, 0.0, GradUpKMetricIJ),
        ],
        FormulaId::RiemannFirst => vec![
            term(0.5, 0.0, HessIKDeltaLJ),
            term(-0.5, 0.0, HessJKDeltaLI),
            term(0.5, 0.0, HessJUpLMetricIK),
            term(-0.5, 0.0, HessIUpLMetricJK),
        ],
        // −(n−1)Δφ − (n/2)φ/τ
        FormulaId::ScalarFirst => vec![term(1.0, -1.0, LapPhi), term(0.0, -0.5, PhiOverTau)],
        FormulaId::VolumeFirst => vec![term(0.0, 0.5, PhiDensity)],
        // −φΔu + ((n−2)/2)⟨∇φ,∇u⟩
        FormulaId::LaplacianFirst => vec![term(-1.0, 0.0, PhiLapU), term(-1.0, 0.5, GradPhiGradU)],
        FormulaId::InverseSecond => vec![term(2.0, 0.0, PhiSqInverse)],
        FormulaId::ChristoffelSecond => vec![
            term(-1.0, 0.0, PhiGradIDeltaKJ),
            term(-1.0, 0.0, PhiGradJDeltaKI),
            term(1.0, 0.0, PhiGradUpKMetricIJ),
        ],
        // 2φ²Δu − 2(n−2)φ⟨∇φ,∇u⟩
        FormulaId::LaplacianSecond => vec![term(2.0, 0.0, PhiSqLapU), term(4.0, -2.0, PhiGradPhiGradU)],
        // (φΔφ − ((n−4)/2)|∇φ|²) g + (n−2)(φ∇²φ + (3/2) dφ⊗dφ)
        FormulaId::RicciSecond => vec![
            term(1.0, 0.0, PhiLapPhiMetric),
            term(2.0, -0.5, GradSqMetric),
            term(-2.0, 1.0, PhiHess),
            term(-3.0, 1.5, GradGrad),
        ],
    };
    Formula { id, terms }
}

/// Shortened forms that drop gradient terms: `Δ″ = 2φ²Δ` and
/// `Ric″ = (φΔφ − ((n−2)/2)|∇φ|²) g + (n−2)(φ∇²φ + dφ⊗dφ)`. They hold only
/// when `⟨∇φ, ∇u⟩` (resp. `dφ`) vanishes and are evaluated for comparison.
pub fn shortened_formula(id: FormulaId) -> Option<Formula> {
    use TermKind::*;
    let terms = match id {
        FormulaId::LaplacianSecond => vec![term(2.0, 0.0, PhiSqLapU)],
        FormulaId::RicciSecond => vec![
            term(1.0, 0.0, PhiLapPhiMetric),
            term(1.0, -0.5, GradSqMetric),
            term(-2.0, 1.0, PhiHess),
            term(-2.0, 1.0, GradGrad),
        ],
        _ => return None,
    };
    Some(Formula { id, terms })
}

/// Which part of an [`Affine`] coefficient a mutation changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientPart {
    Constant,
    Slope,
}

/// Perturbation of one coefficient of one formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mutation {
    pub formula: FormulaId,
    pub term: usize,
    pub part: CoefficientPart,
    pub delta: f64,
}

impl Mutation {
    pub fn apply(&self, f: &mut Formula) {
        if f.id != self.formula {
            return;
        }
        let c = &mut f.terms[self.term].coefficient;
        match self.part {
            CoefficientPart::Constant => c.constant += self.delta,
            CoefficientPart::Slope => c.slope += self.delta,
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = match self.part {
            CoefficientPart::Constant => "constant",
            CoefficientPart::Slope => "slope",
        };
        write!(f, "{}[term {}].{} {:+}", self.formula, self.term, part, self.delta)
    }
}

/// Every single-coefficient perturbation by `±½` of the constant and of the
/// slope in `n`, for every term of every formula.
pub fn single_coefficient_mutations() -> Vec<Mutation> {
    let mut out = Vec::new();
    for id in FormulaId::ALL {
        for t in 0..formula(id).terms.len() {
            for part in [CoefficientPart::Constant, CoefficientPart::Slope] {
                for delta in [0.5, -0.5] {
                    out.push(Mutation {
                        formula: id,
                        term: t,
                        part,
                        delta,
                    });
                }
            }
        }
    }
    out
}

/// Background data at `s = 0` that the term tensors are assembled from.
pub struct PointData<T> {
    pub n: usize,
    pub tau: T,
    pub geo: GeometryJet<T>,
    pub phi: Jet2<T>,
    pub u: Jet2<T>,
    /// `∇_i φ` (coordinate gradient).
    pub dphi: Vec<T>,
    /// `∇^k φ`.
    pub dphi_up: Vec<T>,
    /// `∇_i∇_j φ`.
    pub hess: Vec<T>,
    /// `∇_i∇^l φ`, index `(i, l)`.
    pub hess_mixed: Vec<T>,
    pub lap_phi: T,
    pub grad_sq: T,
    pub lap_u: T,
    pub grad_phi_grad_u: T,
    pub density: T,
}

impl<T: Real> PointData<T> {
    pub fn new(phi: &EigenFunction<T>, u: &TestFunction<T>, tau: Tau<T>, p: &ChartPoint<T>) -> Self {
        let geo = fs_metric_at(p);
        let d = geo.dim;
        let phi_jet = phi.jet(p);
        let u_jet = u.jet(p);
        let dphi: Vec<T> = (0..d).map(|i| phi_jet.d(i)).collect();
        let dphi_up: Vec<T> = (0..d)
            .map(|k| (0..d).fold(T::zero(), |s, l| s + geo.g_inv[k * d + l] * dphi[l]))
            .collect();
        let hess = geo.covariant_hessian(&phi_jet);
        let mut hess_mixed = vec![T::zero(); d * d];
        for i in 0..d {
            for l in 0..d {
                hess_mixed[i * d + l] = (0..d).fold(T::zero(), |s, m| s + hess[i * d + m] * geo.g_inv[m * d + l]);
            }
        }
        let lap_phi = geo.trace(&hess);
        let grad_sq = geo.inner_gradients(&phi_jet, &phi_jet);
        let lap_u = geo.laplacian(&u_jet);
        let grad_phi_grad_u = geo.inner_gradients(&phi_jet, &u_jet);
        let density = geo.volume_density();
        Self {
            n: d,
            tau: tau.0,
            geo,
            phi: phi_jet,
            u: u_jet,
            dphi,
            dphi_up,
            hess,
            hess_mixed,
            lap_phi,
            grad_sq,
            lap_u,
            grad_phi_grad_u,
            density,
        }
    }

    /// Components of one term tensor.
    pub fn term(&self, kind: TermKind) -> Vec<T> {
        use TermKind::*;
        let d = self.n;
        let phi = self.phi.value;
        let g = &self.geo.g;
        let gi = &self.geo.g_inv;
        let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
        let gamma_shape = |f: &dyn Fn(usize, usize, usize) -> T| {
            let mut v = Vec::with_capacity(d * d * d);
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        v.push(f(k, i, j));
                    }
                }
            }
            v
        };
        let riemann_shape = |f: &dyn Fn(usize, usize, usize, usize) -> T| {
            let mut v = Vec::with_capacity(d * d * d * d);
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            v.push(f(i, j, k, l));
                        }
                    }
                }
            }
            v
        };
        match kind {
            PhiInverse => gi.iter().map(|&x| phi * x).collect(),
            PhiSqInverse => gi.iter().map(|&x| phi * phi * x).collect(),
            GradIDeltaKJ => gamma_shape(&|k, i, j| self.dphi[i] * delta(k, j)),
            GradJDeltaKI => gamma_shape(&|k, i, j| self.dphi[j] * delta(k, i)),
            GradUpKMetricIJ => gamma_shape(&|k, i, j| self.dphi_up[k] * g[i * d + j]),
            PhiGradIDeltaKJ => gamma_shape(&|k, i, j| phi * self.dphi[i] * delta(k, j)),
            PhiGradJDeltaKI => gamma_shape(&|k, i, j| phi * self.dphi[j] * delta(k, i)),
            PhiGradUpKMetricIJ => gamma_shape(&|k, i, j| phi * self.dphi_up[k] * g[i * d + j]),
            HessIKDeltaLJ => riemann_shape(&|i, j, k, l| self.hess[i * d + k] * delta(l, j)),
            HessJKDeltaLI => riemann_shape(&|i, j, k, l| self.hess[j * d + k] * delta(l, i)),
            HessJUpLMetricIK => riemann_shape(&|i, j, k, l| self.hess_mixed[j * d + l] * g[i * d + k]),
            HessIUpLMetricJK => riemann_shape(&|i, j, k, l| self.hess_mixed[i * d + l] * g[j * d + k]),
            LapPhi => vec![self.lap_phi],
            PhiOverTau => vec![phi / self.tau],
            PhiDensity => vec![phi * self.density],
            PhiLapU => vec![phi * self.lap_u],
            GradPhiGradU => vec![self.grad_phi_grad_u],
            PhiSqLapU => vec![phi * phi * self.lap_u],
            PhiGradPhiGradU => vec![phi * self.grad_phi_grad_u],
            PhiLapPhiMetric => g.iter().map(|&x| phi * self.lap_phi * x).collect(),
            GradSqMetric => g.iter().map(|&x| self.grad_sq * x).collect(),
            PhiHess => self.hess.iter().map(|&x| phi * x).collect(),
            GradGrad => {
                let mut v = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        v.push(self.dphi[i] * self.dphi[j]);
                    }
                }
                v
            }
        }
    }

    /// Right-hand side of `f` at this point.
    pub fn evaluate(&self, f: &Formula) -> Vec<T> {
        let mut out = vec![T::zero(); f.id.quantity().len(self.n)];
        for t in &f.terms {
            let c = lit::<T>(t.coefficient.at(self.n));
            if c == T::zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.term(t.kind)) {
                *o = *o + c * v;
            }
        }
        out
    }
}

/// Fixed test function for the Laplacian variations: a sum of products of
/// first eigenfunctions, which is not itself an eigenfunction.
#[derive(Clone, Debug)]
pub struct TestFunction<T> {
    a: EigenFunction<T>,
    b: EigenFunction<T>,
    c: EigenFunction<T>,
}

impl<T: Real> TestFunction<T> {
    /// `u = φ_{E00−E11} · φ_{i(E0N−EN0)} + φ_{E1N+EN1}` on CP^N, `N ≥ 2`.
    pub fn standard(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::RequiresTwo(n));
        }
        Ok(Self {
            a: EigenFunction::new(HermitianForm::diagonal_difference(n, 0)),
            b: EigenFunction::new(HermitianForm::antisymmetric_unit(n, 0, n)),
            c: EigenFunction::new(HermitianForm::symmetric_unit(n, 1, n)),
        })
    }

    pub fn jet(&self, p: &ChartPoint<T>) -> Jet2<T> {
        self.a.jet(p) * self.b.jet(p) + self.c.jet(p)
    }
}

/// Geometry jet of `(1 + sφ) g_FS` at `p`, differentiated from scratch.
pub fn family_geometry<T: Real>(phi: &EigenFunction<T>, s: T, p: &ChartPoint<T>) -> Result<GeometryJet<T>> {
    let seeds = Jet2::seed(p.coords());
    let factor = Jet2::constant(T::one()) + phi.jet_at(p.chart(), &seeds).scale(s);
    if !(factor.value > T::zero()) {
        return Err(Error::StepTooLarge {
            step: s.to_f64().unwrap(),
        });
    }
    let d = seeds.len();
    let entries: Vec<Jet2<T>> = real_metric(&seeds).into_iter().map(|e| e * factor.clone()).collect();
    let mut g = Vec::with_capacity(d * d);
    let mut dg = vec![T::zero(); d * d * d];
    let mut ddg = vec![T::zero(); d * d * d * d];
    for (ij, e) in entries.iter().enumerate() {
        g.push(e.value);
        for k in 0..d {
            dg[k * d * d + ij] = e.d(k);
            for l in 0..d {
                ddg[(l * d + k) * d * d + ij] = e.dd(l, k);
            }
        }
    }
    GeometryJet::from_metric_jet(MetricJet {
        dim: d,
        g,
        dg,
        ddg: Some(ddg),
    })
    .map_err(|_| Error::StepTooLarge {
        step: s.to_f64().unwrap(),
    })
}

/// Default s-step of the finite-difference oracle.
pub const FD_STEP: f64 = 5e-3;

/// Largest admissible `|s|`: `½ / sup|φ|`, bounding `sup|φ|` by the
/// Frobenius norm of the form.
pub fn family_epsilon(form: &HermitianForm) -> f64 {
    let bound = form.sup_bound();
    if bound == 0.0 {
        f64::INFINITY
    } else {
        0.5 / bound
    }
}

/// Values of every quantity at the stencil nodes `s ∈ {−2h, −h, 0, h, 2h}`.
struct Stencil<T> {
    step: T,
    values: Vec<[Vec<T>; 5]>,
}

const QUANTITIES: [Quantity; 7] = [
    Quantity::Inverse,
    Quantity::Christoffel,
    Quantity::Riemann,
    Quantity::Scalar,
    Quantity::VolumeDensity,
    Quantity::Laplacian,
    Quantity::Ricci,
];

impl<T: Real> Stencil<T> {
    fn build(phi: &EigenFunction<T>, u: &TestFunction<T>, p: &ChartPoint<T>, step: T) -> Result<Self> {
        if 2.0 * step.to_f64().unwrap() >= family_epsilon(phi.form()) {
            return Err(Error::StepTooLarge {
                step: step.to_f64().unwrap(),
            });
        }
        let u_jet = u.jet(p);
        let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let geos: Vec<GeometryJet<T>> = nodes
            .iter()
            .map(|&c| family_geometry(phi, lit::<T>(c) * step, p))
            .collect::<Result<_>>()?;
        let values = QUANTITIES
            .iter()
            .map(|q| {
                let v: Vec<Vec<T>> = geos.iter().map(|g| q.evaluate(g, &u_jet)).collect();
                [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()]
            })
            .collect();
        Ok(Self { step, values })
    }

    fn derivative(&self, q: Quantity, order: u8) -> Vec<T> {
        let idx = QUANTITIES.iter().position(|&x| x == q).unwrap();
        let [m2, m1, z, p1, p2] = &self.values[idx];
        let h = self.step;
        let (two, three, four) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));
        (0..z.len())
            .map(|c| {
                let (fine, coarse) = if order == 1 {
                    ((p1[c] - m1[c]) / (two * h), (p2[c] - m2[c]) / (four * h))
                } else {
                    (
                        (p1[c] - two * z[c] + m1[c]) / (h * h),
                        (p2[c] - two * z[c] + m2[c]) / (four * h * h),
                    )
                };
                (four * fine - coarse) / three
            })
            .collect()
    }
}

/// Richardson-extrapolated central difference in `s` of `quantity` at `p`.
pub fn fd_derivative<T: Real>(
    phi: &EigenFunction<T>,
    u: &TestFunction<T>,
    quantity: Quantity,
    order: u8,
    p: &ChartPoint<T>,
    step: T,
) -> Result<Vec<T>> {
    if !(order == 1 || order == 2) {
        return Err(Error::Invalid(format!("derivative order must be 1 or 2, got {order}")));
    }
    Ok(Stencil::build(phi, u, p, step)?.derivative(quantity, order))
}

/// Closed-form right-hand side of `id` at `p`.
pub fn closed_form_derivative<T: Real>(
    id: FormulaId,
    phi: &EigenFunction<T>,
    u: &TestFunction<T>,
    tau: Tau<T>,
    p: &ChartPoint<T>,
) -> Vec<T> {
    PointData::new(phi, u, tau, p).evaluate(&formula(id))
}

/// Geometry of `e^{2σ} g_FS` from the conformal-change formulas.
#[derive(Clone, Debug)]
pub struct ConformalGeometry<T> {
    pub g_inv: Vec<T>,
    pub christoffel: Vec<T>,
    pub riemann: Vec<T>,
    pub ricci: Vec<T>,
    pub scalar: T,
    pub volume_density: T,
    pub laplacian: T,
}

impl<T: Real> ConformalGeometry<T> {
    pub fn get(&self, q: Quantity) -> Vec<T> {
        match q {
            Quantity::Inverse => self.g_inv.clone(),
            Quantity::Christoffel => self.christoffel.clone(),
            Quantity::Riemann => self.riemann.clone(),
            Quantity::Scalar => vec![self.scalar],
            Quantity::VolumeDensity => vec![self.volume_density],
            Quantity::Laplacian => vec![self.laplacian],
            Quantity::Ricci => self.ricci.clone(),
        }
    }
}

/// `(1 + sφ) g_FS = e^{2σ} g_FS` via the standard transformation laws for
/// `σ = ½ log(1 + sφ)`.
pub fn conformal_geometry<T: Real>(
    phi: &EigenFunction<T>,
    u: &TestFunction<T>,
    s: T,
    p: &ChartPoint<T>,
) -> Result<ConformalGeometry<T>> {
    let bg = curvature_at(p);
    let d = bg.dim;
    let nf = count::<T>(d);
    let half = lit::<T>(0.5);
    let pj = phi.jet(p);
    let psi = T::one() + s * pj.value;
    if !(psi > T::zero()) {
        return Err(Error::StepTooLarge {
            step: s.to_f64().unwrap(),
        });
    }
    // σ_i = ψ_i / (2ψ), σ_ij = ψ_ij / (2ψ) − ψ_i ψ_j / (2ψ²)
    let ds: Vec<T> = (0..d).map(|i| s * pj.d(i) / (lit::<T>(2.0) * psi)).collect();
    let mut dds = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            dds[i * d + j] =
                s * pj.dd(i, j) / (lit::<T>(2.0) * psi) - s * s * pj.d(i) * pj.d(j) / (lit::<T>(2.0) * psi * psi);
        }
    }
    let sigma = Jet2::from_parts(half * psi.ln(), ds.clone(), dds);
    let hess_sigma = bg.covariant_hessian(&sigma);
    let lap_sigma = bg.trace(&hess_sigma);
    let grad_sq = bg.inner_gradients(&sigma, &sigma);
    let ds_up: Vec<T> = (0..d)
        .map(|k| (0..d).fold(T::zero(), |acc, l| acc + bg.g_inv[k * d + l] * ds[l]))
        .collect();
    let g = &bg.g;

    let g_inv: Vec<T> = bg.g_inv.iter().map(|&x| x / psi).collect();

    let mut christoffel = bg.christoffel.clone();
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut extra = -g[i * d + j] * ds_up[k];
                if k == j {
                    extra = extra + ds[i];
                }
                if k == i {
                    extra = extra + ds[j];
                }
                christoffel[(k * d + i) * d + j] = christoffel[(k * d + i) * d + j] + extra;
            }
        }
    }

    // T = ∇²σ − dσ⊗dσ + ½|∇σ|² g; Rm̃ = ψ (Rm − T ⊘ g) in (0,4) form.
    let mut t = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            t[i * d + j] = hess_sigma[i * d + j] - ds[i] * ds[j] + half * grad_sq * g[i * d + j];
        }
    }
    let kn = |w: usize, x: usize, y: usize, z: usize| {
        t[w * d + z] * g[x * d + y] + t[x * d + y] * g[w * d + z]
            - t[w * d + y] * g[x * d + z]
            - t[x * d + z] * g[w * d + y]
    };
    let mut rm_lower = vec![T::zero(); d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let rm = (0..d).fold(T::zero(), |acc, m| acc + bg.riemann(i, j, k, m) * g[m * d + l]);
                    rm_lower[((i * d + j) * d + k) * d + l] = psi * (rm - kn(i, j, k, l));
                }
            }
        }
    }
    let mut riemann = vec![T::zero(); d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    riemann[((i * d + j) * d + k) * d + l] = (0..d).fold(T::zero(), |acc, m| {
                        acc + rm_lower[((i * d + j) * d + k) * d + m] * g_inv[m * d + l]
                    });
                }
            }
        }
    }

    let nm2 = nf - lit::<T>(2.0);
    let ricci: Vec<T> = (0..d * d)
        .map(|ij| {
            let (i, j) = (ij / d, ij % d);
            bg.ricci()[ij] - nm2 * (hess_sigma[ij] - ds[i] * ds[j]) - (lap_sigma + nm2 * grad_sq) * g[ij]
        })
        .collect();
    let scalar = (bg.scalar() - lit::<T>(2.0) * (nf - T::one()) * lap_sigma - nm2 * (nf - T::one()) * grad_sq) / psi;
    let volume_density = psi.powf(nf * half) * bg.volume_density();
    let uj = u.jet(p);
    let laplacian = (bg.laplacian(&uj) + nm2 * bg.inner_gradients(&sigma, &uj)) / psi;
    Ok(ConformalGeometry {
        g_inv,
        christoffel,
        riemann,
        ricci,
        scalar,
        volume_density,
        laplacian,
    })
}

/// One closed-form versus finite-difference comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationReport {
    pub formula: FormulaId,
    pub order: u8,
    pub point_index: usize,
    pub point: Vec<f64>,
    /// Closed-form and finite-difference values at the worst component.
    pub closed_value: f64,
    pub fd_value: f64,
    pub worst_component: usize,
    /// `max_c |closed − fd|`.
    pub abs_residual: f64,
    /// `abs_residual / max_c |closed|` (0 when both vanish).
    pub rel_residual: f64,
    /// `abs_residual / max(max_c |closed|, abs_floor / rel_tol)`; passes iff `<= rel_tol`.
    pub floored_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub points: usize,
    pub seed: u64,
    pub step: f64,
    pub rel_tol: f64,
    pub abs_floor: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            points: 50,
            seed: 7,
            step: FD_STEP,
            rel_tol: 1e-5,
            abs_floor: 1e-9,
        }
    }
}

fn compare(
    formula: FormulaId,
    index: usize,
    p: &ChartPoint<f64>,
    closed: &[f64],
    fd: &[f64],
    opts: &SuiteOptions,
) -> VariationReport {
    let (worst, abs) = closed
        .iter()
        .zip(fd)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |(wi, wv), (i, v)| if v > wv { (i, v) } else { (wi, wv) });
    let scale = closed.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let rel = if scale > 0.0 {
        abs / scale
    } else if abs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    VariationReport {
        formula,
        order: formula.order(),
        point_index: index,
        point: p.coords().to_vec(),
        closed_value: closed[worst],
        fd_value: fd[worst],
        worst_component: worst,
        abs_residual: abs,
        rel_residual: rel,
        floored_residual: abs / scale.max(opts.abs_floor / opts.rel_tol),
        pass: abs <= (opts.rel_tol * scale).max(opts.abs_floor),
    }
}

/// Per-point background data and stencil, shared by all formulas.
fn suite_data(n: usize, opts: &SuiteOptions) -> Result<Vec<(ChartPoint<f64>, PointData<f64>, Stencil<f64>)>> {
    let form = special_phi(n)?;
    let phi = EigenFunction::<f64>::new(form);
    let u = TestFunction::<f64>::standard(n)?;
    let tau = einstein_tau::<f64>(n)?;
    let points = sampling::chart_points(n, opts.points, opts.seed, sampling::SAMPLE_RADIUS);
    points
        .into_par_iter()
        .map(|p| {
            let data = PointData::new(&phi, &u, tau, &p);
            let stencil = Stencil::build(&phi, &u, &p, opts.step)?;
            Ok((p, data, stencil))
        })
        .collect()
}

fn run_formulas(
    data: &[(ChartPoint<f64>, PointData<f64>, Stencil<f64>)],
    formulas: &[Formula],
    opts: &SuiteOptions,
) -> Vec<VariationReport> {
    let mut out = Vec::with_capacity(formulas.len() * data.len());
    for f in formulas {
        for (idx, (p, pd, st)) in data.iter().enumerate() {
            let closed = pd.evaluate(f);
            let fd = st.derivative(f.id.quantity(), f.id.order());
            out.push(compare(f.id, idx, p, &closed, &fd, opts));
        }
    }
    out
}

/// Compares all ten formulas with the finite-difference oracle at seeded
/// points, for the special eigenfunction on CP^N. `mutation`, if given,
/// perturbs one coefficient first.
pub fn verify_variation_suite(
    n: usize,
    opts: &SuiteOptions,
    mutation: Option<Mutation>,
) -> Result<Vec<VariationReport>> {
    if opts.points == 0 {
        return Err(Error::Invalid("points must be at least 1".into()));
    }
    let data = suite_data(n, opts)?;
    let formulas: Vec<Formula> = FormulaId::ALL
        .iter()
        .map(|&id| {
            let mut f = formula(id);
            if let Some(m) = mutation {
                m.apply(&mut f);
            }
            f
        })
        .collect();
    Ok(run_formulas(&data, &formulas, opts))
}

/// The shortened second-order forms against the same oracle. Informational:
/// they are expected to disagree wherever the dropped terms are nonzero.
pub fn compare_shortened_forms(n: usize, opts: &SuiteOptions) -> Result<Vec<VariationReport>> {
    let data = suite_data(n, opts)?;
    let formulas: Vec<Formula> = FormulaId::ALL.iter().filter_map(|&id| shortened_formula(id)).collect();
    Ok(run_formulas(&data, &formulas, opts))
}

/// Formulas with at least one failing report.
pub fn failing_formulas(reports: &[VariationReport]) -> Vec<FormulaId> {
    let mut out: Vec<FormulaId> = reports.iter().filter(|r| !r.pass).map(|r| r.formula).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests;
