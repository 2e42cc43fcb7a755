//! Term rewriting over formal integrals on CP^N that reduces the third
//! variation of ν along `h = φ g` to a multiple of `∫φ³ dV`.
//!
//! The integrand is assembled from pre-traced tensor pieces (only `⟨g, ·⟩`
//! contractions occur for a conformal `h`). Coefficients are exact: rational
//! functions of `n` times Laurent monomials in `τ`. `τ″` is a formal symbol
//! and is never given a value.
//!
//! Two input sets are supported. [`ReductionInputs::shortened`] takes the
//! short form of `Ric″` and the `f″` relation that goes with it.
//! [`ReductionInputs::derived`] takes every pointwise ingredient from the
//! coefficient tables of [`crate::variation`], which the finite-difference
//! suite checks, and derives the `f″` relation from the minimizer equation.

pub mod expr;
pub mod ratfunc;
pub mod rules;

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{einstein_tau, fs_metric_at};
use crate::polynomial::int;
use crate::quadrature::{integrate_cpn, QuadratureOptions};
use crate::sampling::shard_rng;
use crate::spectral::{special_phi, EigenFunction};
use crate::variation::{formula, shortened_formula, Affine, Formula, FormulaId, TermKind};

pub use expr::{phi_pow, Coeff, Expr, Gen, IntegralExpr, Mono};
pub use ratfunc::{Poly, RatFunc};
pub use rules::{apply_at, apply_rule, redexes, rewrite, FSecondValues, Rule};

/// The real dimension `n`, symbolic or fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NValue {
    Symbolic,
    Fixed(i64),
}

impl NValue {
    pub fn ratfunc(self) -> RatFunc {
        match self {
            NValue::Symbolic => RatFunc::n(),
            NValue::Fixed(k) => RatFunc::int(k),
        }
    }

    /// Substitutes a fixed `n` into a coefficient built with symbolic `n`.
    pub fn specialize(self, r: &RatFunc) -> Result<RatFunc> {
        match self {
            NValue::Symbolic => Ok(r.clone()),
            NValue::Fixed(k) => r
                .eval(&int(k))
                .map(RatFunc::constant)
                .ok_or_else(|| Error::Invalid(format!("pole at n = {k}"))),
        }
    }
}

fn affine(a: Affine) -> RatFunc {
    let c = BigRational::from_float(a.constant).expect("finite coefficient");
    let s = BigRational::from_float(a.slope).expect("finite coefficient");
    RatFunc::affine(c, s)
}

fn coefficient_of(f: &Formula, kind: TermKind) -> RatFunc {
    f.terms
        .iter()
        .filter(|t| t.kind == kind)
        .fold(RatFunc::zero(), |acc, t| &acc + &affine(t.coefficient))
}

/// `Ric″ = a φΔφ g + b |∇φ|² g + c φ∇²φ + d dφ⊗dφ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RicciSecond {
    pub a: RatFunc,
    pub b: RatFunc,
    pub c: RatFunc,
    pub d: RatFunc,
}

impl RicciSecond {
    pub fn from_formula(f: &Formula) -> Self {
        Self {
            a: coefficient_of(f, TermKind::PhiLapPhiMetric),
            b: coefficient_of(f, TermKind::GradSqMetric),
            c: coefficient_of(f, TermKind::PhiHess),
            d: coefficient_of(f, TermKind::GradGrad),
        }
    }

    /// The form checked by the finite-difference suite.
    pub fn full() -> Self {
        Self::from_formula(&formula(FormulaId::RicciSecond))
    }

    /// `(φΔφ − ((n−2)/2)|∇φ|²) g + (n−2)(φ∇²φ + dφ⊗dφ)`.
    pub fn shortened() -> Self {
        Self::from_formula(&shortened_formula(FormulaId::RicciSecond).expect("shortened Ricci form"))
    }

    /// `g^{ij} Ric″_ij = (n a + c) φΔφ + (n b + d) |∇φ|²`.
    pub fn trace(&self, n: NValue) -> Result<Expr> {
        let nr = n.ratfunc();
        let lap = n.specialize(&(&(&nr * &self.a) + &self.c))?;
        let grad = n.specialize(&(&(&nr * &self.b) + &self.d))?;
        Ok(&Expr::term(lap.into(), phi_pow(1).with(Gen::LapPhi, 1)) + &Expr::term(grad.into(), Mono::of(Gen::GradSq)))
    }
}

/// First-order data of the conformal variation, read off the coefficient
/// tables: `(g⁻¹)′ = i1 φ g⁻¹`, `(g⁻¹)″ = i2 φ² g⁻¹`,
/// `g^{ij} Γ′^k_ij = γ ∇^kφ`, `Ric′ = r_hess ∇²φ + r_lap Δφ g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderData {
    pub i1: RatFunc,
    pub i2: RatFunc,
    pub gamma_trace: RatFunc,
    pub ricci_hess: RatFunc,
    pub ricci_lap: RatFunc,
    /// `v = v_coeff φ`.
    pub v_coeff: RatFunc,
}

impl FirstOrderData {
    pub fn from_tables() -> Self {
        let n = RatFunc::n();
        let inv1 = formula(FormulaId::InverseFirst);
        let inv2 = formula(FormulaId::InverseSecond);
        let gam = formula(FormulaId::ChristoffelFirst);
        let rm = formula(FormulaId::RiemannFirst);
        let g1 = coefficient_of(&gam, TermKind::GradIDeltaKJ);
        let g2 = coefficient_of(&gam, TermKind::GradJDeltaKI);
        let g3 = coefficient_of(&gam, TermKind::GradUpKMetricIJ);
        let e1 = coefficient_of(&rm, TermKind::HessIKDeltaLJ);
        let e2 = coefficient_of(&rm, TermKind::HessJKDeltaLI);
        let e3 = coefficient_of(&rm, TermKind::HessJUpLMetricIK);
        let e4 = coefficient_of(&rm, TermKind::HessIUpLMetricJK);
        Self {
            i1: coefficient_of(&inv1, TermKind::PhiInverse),
            i2: coefficient_of(&inv2, TermKind::PhiSqInverse),
            gamma_trace: &(&g1 + &g2) + &(&n * &g3),
            // Σ_i R′_ijk^i: δ^i_j → 1, δ^i_i → n, g_ik raises to ∇_j∇_k, g_jk leaves Δφ g.
            ricci_hess: &(&e1 + &(&n * &e2)) + &e3,
            ricci_lap: e4,
            v_coeff: RatFunc::int(2),
        }
    }

    /// `f′ = f_coeff φ` from `v = −2f′ + H`, `H = nφ`.
    pub fn f_coeff(&self) -> RatFunc {
        &(&RatFunc::n() - &self.v_coeff) / &RatFunc::int(2)
    }
}

/// `(Δ + 1/(2τ)) f″ = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSecondRelation {
    pub rhs: Expr,
}

fn c(r: RatFunc, tau: i32) -> Coeff {
    Coeff::tau_pow(r, tau)
}

fn mono(phi: u32, lap: u32, grad: u32) -> Mono {
    Mono::one()
        .with(Gen::Phi, phi)
        .with(Gen::LapPhi, lap)
        .with(Gen::GradSq, grad)
}

impl FSecondRelation {
    /// `−nφΔφ − (n/(2τ))φ² − nτ″/(4τ²)`.
    pub fn shortened(n: NValue) -> Self {
        let nr = n.ratfunc();
        let mut rhs = Expr::zero();
        rhs.add_term(mono(1, 1, 0), c(-&nr, 0));
        rhs.add_term(mono(2, 0, 0), c(&nr / &RatFunc::int(-2), -1));
        rhs.add_term(Mono::of(Gen::TauSecond), c(&nr / &RatFunc::int(-4), -2));
        Self { rhs }
    }

    /// Second s-derivative at `s = 0` of the minimizer equation
    /// `τ(−2Δf + |∇f|² − R) − f + ν = 0`, using `f = 0`, `τ′ = 0`,
    /// `ν″ = 0`, and `R = n/(2τ)`.
    pub fn derive(n: NValue, ricci: &RicciSecond, first: &FirstOrderData) -> Result<Self> {
        let nr = n.ratfunc();
        let sp = |r: &RatFunc| n.specialize(r);
        let fp = sp(&first.f_coeff())?;
        let r_scalar = c(&nr / &RatFunc::int(2), -1);

        // R″ = (g⁻¹)″·Ric + 2 (g⁻¹)′·Ric′ + g⁻¹·Ric″
        let tr_ric1 = sp(&(&first.ricci_hess + &(&nr * &first.ricci_lap)))?;
        let mut r2 = ricci.trace(n)?;
        r2.add_term(mono(2, 0, 0), &c(sp(&first.i2)?, 0) * &r_scalar);
        r2.add_term(mono(1, 1, 0), c(&(&RatFunc::int(2) * &sp(&first.i1)?) * &tr_ric1, 0));

        // (|∇f|²)″ = 2 |∇f′|²
        let grad_f2 = Expr::term(c(&(&RatFunc::int(2) * &fp) * &fp, 0), mono(0, 0, 1));

        // (Δf)″ = Δf″ + 2 (g⁻¹)′·∇²f′ + g⁻¹·(−2 Γ′·∇f′)
        let mut lap_f2 = Expr::gen(Gen::LapFSecond);
        lap_f2.add_term(mono(1, 1, 0), c(&(&RatFunc::int(2) * &sp(&first.i1)?) * &fp, 0));
        lap_f2.add_term(
            mono(0, 0, 1),
            c(&(&RatFunc::int(-2) * &sp(&first.gamma_trace)?) * &fp, 0),
        );

        let tau = c(RatFunc::one(), 1);
        let mut e = lap_f2.scale(&c(RatFunc::int(-2), 1));
        e = &e + &grad_f2.scale(&tau);
        e = &e - &r2.scale(&tau);
        e.add_term(Mono::of(Gen::TauSecond), -&r_scalar);
        e.add_term(Mono::of(Gen::FSecond), Coeff::int(-1));

        let a = e.remove(&Mono::of(Gen::LapFSecond)).ok_or(Error::SingularSystem)?;
        let b = e.remove(&Mono::of(Gen::FSecond)).unwrap_or_default();
        let a_inv = a.recip().ok_or(Error::SingularSystem)?;
        if &b * &a_inv != c(RatFunc::constant(BigRational::new(1.into(), 2.into())), -1) {
            return Err(Error::ReductionMismatch(format!(
                "f'' relation has operator Δ + ({}) instead of Δ + 1/(2τ)",
                &b * &a_inv
            )));
        }
        e.check_linear_in_f()?;
        if e.terms().any(|(m, _)| m.exp(Gen::FSecond) + m.exp(Gen::LapFSecond) > 0) {
            return Err(Error::ReductionMismatch("f'' relation is not closed".into()));
        }
        Ok(Self {
            rhs: e.scale(&(-&a_inv)),
        })
    }

    /// Multiplies by `φ`, integrates, and solves for `∫φf″` and `∫φΔf″`
    /// with self-adjointness and the eigen-equation.
    pub fn solve(&self) -> Result<FSecondValues> {
        let base = [Rule::Eigen, Rule::GradientReduction, Rule::ZeroMean];
        let rhs = IntegralExpr::integrate(&Expr::gen(Gen::Phi) * &self.rhs);
        let r0 = reduce(&rhs, &base, None, &mut Strategy::Canonical)?.normal_form;
        // ∫φΔf″ = k ∫φf″
        let lap_term = IntegralExpr::of(Coeff::one(), phi_pow(1).with(Gen::LapFSecond, 1));
        let moved = reduce(
            &lap_term,
            &[Rule::SelfAdjoint, Rule::Eigen],
            None,
            &mut Strategy::Canonical,
        )?
        .normal_form;
        let phi_f = phi_pow(1).with(Gen::FSecond, 1);
        if moved.0.len() != 1 || moved.coefficient(&phi_f).is_zero() {
            return Err(Error::ReductionMismatch(format!("self-adjoint step produced {moved}")));
        }
        let k = moved.coefficient(&phi_f);
        // ∫φΔf″ + (1/(2τ)) ∫φf″ = r0  ⇒  (k + 1/(2τ)) ∫φf″ = r0
        let m = &k + &c(RatFunc::constant(BigRational::new(1.into(), 2.into())), -1);
        if m.is_zero() {
            return Err(Error::SingularSystem);
        }
        let inv = m.recip().ok_or(Error::SingularSystem)?;
        let x = r0.scale(&inv);
        Ok(FSecondValues {
            phi_lap_f: x.scale(&k),
            phi_f: x,
        })
    }
}

/// Which `f″` relation to impose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationSource {
    Shortened,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInputs {
    pub ricci: RicciSecond,
    pub first: FirstOrderData,
    pub relation: RelationSource,
}

impl ReductionInputs {
    pub fn shortened() -> Self {
        Self {
            ricci: RicciSecond::shortened(),
            first: FirstOrderData::from_tables(),
            relation: RelationSource::Shortened,
        }
    }

    pub fn derived() -> Self {
        Self {
            ricci: RicciSecond::full(),
            first: FirstOrderData::from_tables(),
            relation: RelationSource::Derived,
        }
    }

    pub fn relation(&self, n: NValue) -> Result<FSecondRelation> {
        match self.relation {
            RelationSource::Shortened => Ok(FSecondRelation::shortened(n)),
            RelationSource::Derived => FSecondRelation::derive(n, &self.ricci, &self.first),
        }
    }
}

/// `−τ ∫ ⟨φg, Ric″ + (∇²f)″ − (g/(2τ))″⟩ dV`; the overall factor
/// `(4πτ)^{−n/2}` stays outside.
pub fn assemble_third_variation(n: NValue, inputs: &ReductionInputs) -> Result<IntegralExpr> {
    let nr = n.ratfunc();
    let sp = |r: &RatFunc| n.specialize(r);
    let fp = sp(&inputs.first.f_coeff())?;
    let mut tr = inputs.ricci.trace(n)?;
    // g^{ij} (∇_i∇_j f)″ = Δf″ − 2γ f′ |∇φ|²
    tr.add_term(Mono::of(Gen::LapFSecond), Coeff::one());
    tr.add_term(
        mono(0, 0, 1),
        c(&(&RatFunc::int(-2) * &sp(&inputs.first.gamma_trace)?) * &fp, 0),
    );
    // −(g/(2τ))″ = (τ″/(2τ²)) g
    tr.add_term(Mono::of(Gen::TauSecond), c(&nr / &RatFunc::int(2), -2));
    let integrand = &Expr::gen(Gen::Phi) * &tr;
    integrand.check_linear_in_f()?;
    Ok(IntegralExpr::integrate(integrand.scale(&c(RatFunc::int(-1), 1))))
}

/// `−τ [2(n−1) ∫φ²Δφ + ∫φΔf″]`.
pub fn expected_checkpoint(n: NValue) -> IntegralExpr {
    let nr = n.ratfunc();
    let mut e = Expr::zero();
    e.add_term(mono(2, 1, 0), c(&RatFunc::int(-2) * &(&nr - &RatFunc::int(1)), 1));
    e.add_term(phi_pow(1).with(Gen::LapFSecond, 1), c(RatFunc::int(-1), 1));
    IntegralExpr(e)
}

/// `(n − 2) ∫φ³`.
pub fn expected_normal_form(n: NValue) -> IntegralExpr {
    IntegralExpr::of((&n.ratfunc() - &RatFunc::int(2)).into(), phi_pow(3))
}

/// `(4πτ)^{−n/2}` as text.
pub fn prefactor_text(n: NValue) -> String {
    match n {
        NValue::Symbolic => "(4*pi*tau)^(-n/2)".into(),
        NValue::Fixed(k) if k % 2 == 0 => format!("(4*pi*tau)^({})", -k / 2),
        NValue::Fixed(k) => format!("(4*pi*tau)^(-{k}/2)"),
    }
}

fn with_prefactor(n: NValue, c: &Coeff) -> String {
    let cs = c.to_string();
    let cs = if cs.contains(' ') && !cs.starts_with('(') {
        format!("({cs})")
    } else {
        cs
    };
    format!("{cs}*{}", prefactor_text(n))
}

/// How the next redex is chosen.
pub enum Strategy {
    /// First rule in the given order, first term in canonical order.
    Canonical,
    /// Uniformly among all (rule, term) redexes.
    Random(rand_chacha::ChaCha8Rng),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub normal_form: IntegralExpr,
    pub steps: Vec<Rule>,
}

/// Step cap for [`reduce`]; the rules terminate long before.
pub const MAX_STEPS: usize = 10_000;

pub fn reduce(
    e: &IntegralExpr,
    rules: &[Rule],
    f_values: Option<&FSecondValues>,
    strategy: &mut Strategy,
) -> Result<Reduced> {
    let mut cur = e.clone();
    let mut steps = Vec::new();
    loop {
        let candidates: Vec<(Rule, Mono)> = rules
            .iter()
            .flat_map(|&r| redexes(r, &cur, f_values).into_iter().map(move |m| (r, m)))
            .collect();
        if candidates.is_empty() {
            return Ok(Reduced {
                normal_form: cur,
                steps,
            });
        }
        if steps.len() >= MAX_STEPS {
            return Err(Error::NonConfluent(format!("no normal form after {MAX_STEPS} steps")));
        }
        let (rule, m) = match strategy {
            Strategy::Canonical => candidates[0],
            Strategy::Random(rng) => candidates[rng.random_range(0..candidates.len())],
        };
        cur = apply_at(rule, &cur, &m, f_values).expect("redex applies");
        steps.push(rule);
    }
}

/// Every stage of the reduction, in canonical text where it is an expression.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub n: NValue,
    pub relation_source: RelationSource,
    pub f_second_relation: String,
    pub integrand: String,
    pub checkpoint: String,
    pub checkpoint_expected: String,
    pub checkpoint_matches: bool,
    pub phi_f_second: String,
    pub phi_lap_f_second: String,
    pub before_elimination: String,
    pub normal_form: String,
    pub phi3_coefficient: String,
    /// The `∫φ³` coefficient with the factor `(4πτ)^{−n/2}` restored.
    pub third_variation_coefficient: String,
    pub phi2_coefficient: String,
    pub tau_second_free: bool,
    pub matches_expected: bool,
    #[serde(skip)]
    pub normal_form_expr: IntegralExpr,
}

impl Reduction {
    /// One `key: value` line per stage, for golden files.
    pub fn canonical_text(&self) -> String {
        let n = match self.n {
            NValue::Symbolic => "symbolic".to_string(),
            NValue::Fixed(k) => k.to_string(),
        };
        let source = match self.relation_source {
            RelationSource::Shortened => "shortened",
            RelationSource::Derived => "derived",
        };
        let lines = [
            ("n", n),
            ("inputs", source.to_string()),
            ("f_second_relation", self.f_second_relation.clone()),
            ("integrand", self.integrand.clone()),
            ("checkpoint", self.checkpoint.clone()),
            ("checkpoint_expected", self.checkpoint_expected.clone()),
            ("int_phi_f_second", self.phi_f_second.clone()),
            ("int_phi_lap_f_second", self.phi_lap_f_second.clone()),
            ("before_elimination", self.before_elimination.clone()),
            ("normal_form", self.normal_form.clone()),
            ("third_variation_coefficient", self.third_variation_coefficient.clone()),
        ];
        lines.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

fn basis_ok(e: &IntegralExpr, allowed: &[Mono]) -> bool {
    e.0.terms().all(|(m, _)| allowed.contains(m))
}

/// Reduces the third variation to its normal form and records the
/// checkpoint and the intermediate basis.
pub fn reduce_third_variation(n: NValue, inputs: &ReductionInputs) -> Result<Reduction> {
    let relation = inputs.relation(n)?;
    let values = relation.solve()?;
    let integrand = assemble_third_variation(n, inputs)?;
    let checkpoint = apply_rule(Rule::ZeroMean, &integrand, None);
    let expected_cp = expected_checkpoint(n);

    let no_elim: Vec<Rule> = Rule::ALL
        .iter()
        .copied()
        .filter(|r| *r != Rule::EliminateFSecond)
        .collect();
    let before = reduce(&integrand, &no_elim, None, &mut Strategy::Canonical)?.normal_form;
    let pre_basis = [
        phi_pow(3),
        phi_pow(2),
        phi_pow(1),
        phi_pow(0),
        phi_pow(1).with(Gen::FSecond, 1),
    ];
    if !basis_ok(&before, &pre_basis) {
        return Err(Error::ReductionMismatch(format!(
            "unexpected terms before elimination: {before}"
        )));
    }
    let nf = reduce(&integrand, &Rule::ALL, Some(&values), &mut Strategy::Canonical)?.normal_form;
    if !basis_ok(&nf, &[phi_pow(3), phi_pow(2), phi_pow(0)]) {
        return Err(Error::ReductionMismatch(format!(
            "unexpected terms in normal form: {nf}"
        )));
    }
    let tau_free = nf.0.terms().all(|(m, _)| m.exp(Gen::TauSecond) == 0);
    Ok(Reduction {
        n,
        relation_source: inputs.relation,
        f_second_relation: format!("(lap + 1/(2 tau)) f'' = {}", relation.rhs),
        integrand: integrand.canonical(),
        checkpoint: checkpoint.canonical(),
        checkpoint_expected: expected_cp.canonical(),
        checkpoint_matches: checkpoint == expected_cp,
        phi_f_second: values.phi_f.canonical(),
        phi_lap_f_second: values.phi_lap_f.canonical(),
        before_elimination: before.canonical(),
        normal_form: nf.canonical(),
        phi3_coefficient: nf.coefficient(&phi_pow(3)).to_string(),
        third_variation_coefficient: with_prefactor(n, &nf.coefficient(&phi_pow(3))),
        phi2_coefficient: nf.coefficient(&phi_pow(2)).to_string(),
        tau_second_free: tau_free,
        matches_expected: nf == expected_normal_form(n),
        normal_form_expr: nf,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfluenceReport {
    pub orders: usize,
    pub seed: u64,
    pub distinct_normal_forms: usize,
    pub normal_form: String,
}

/// Reduces the assembled third variation under `orders` random redex
/// choices; order `k` draws from stream `k` of `seed`.
pub fn confluence(n: NValue, inputs: &ReductionInputs, orders: usize, seed: u64) -> Result<ConfluenceReport> {
    let values = inputs.relation(n)?.solve()?;
    let integrand = assemble_third_variation(n, inputs)?;
    let forms: Vec<String> = (0..orders)
        .into_par_iter()
        .map(|k| {
            let mut s = Strategy::Random(shard_rng(seed, k as u64));
            reduce(&integrand, &Rule::ALL, Some(&values), &mut s).map(|r| r.normal_form.canonical())
        })
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<&String> = forms.iter().collect();
    let first = forms.first().cloned().unwrap_or_default();
    if distinct.len() > 1 {
        return Err(Error::NonConfluent(format!("{} distinct normal forms", distinct.len())));
    }
    Ok(ConfluenceReport {
        orders,
        seed,
        distinct_normal_forms: distinct.len(),
        normal_form: first,
    })
}

/// `∫ φ tr Ñ(φg)` with `tr Ñ = (n/2)Δφ + φR − Δφ + ½ v_coeff Δφ`, reduced.
/// Vanishes when `v = 2φ`.
pub fn second_variation_symbolic(n: NValue, first: &FirstOrderData) -> Result<IntegralExpr> {
    let nr = n.ratfunc();
    let lap = n.specialize(&(&(&(&nr / &RatFunc::int(2)) - &RatFunc::one()) + &(&first.v_coeff / &RatFunc::int(2))))?;
    let mut tr = Expr::zero();
    tr.add_term(Mono::of(Gen::LapPhi), lap.into());
    tr.add_term(phi_pow(1), c(&nr / &RatFunc::int(2), -1));
    let e = IntegralExpr::integrate(&Expr::gen(Gen::Phi) * &tr);
    Ok(reduce(&e, &[Rule::Eigen], None, &mut Strategy::Canonical)?.normal_form)
}

/// Numeric value of an `f″`- and `τ″`-free integral expression on CP^N for
/// the special eigenfunction, by chart quadrature.
pub fn evaluate_numeric(e: &IntegralExpr, nn: usize, opts: QuadratureOptions) -> Result<f64> {
    let terms: Vec<(Mono, f64)> = {
        let tau = einstein_tau::<f64>(nn)?.0;
        let n = (2 * nn) as f64;
        e.0.terms().map(|(m, c)| (*m, c.eval_f64(n, tau))).collect()
    };
    for (m, _) in &terms {
        if !m.only(&[Gen::Phi, Gen::LapPhi, Gen::GradSq]) {
            return Err(Error::Invalid(format!("cannot evaluate {m} numerically")));
        }
    }
    let phi = EigenFunction::<f64>::new(special_phi(nn)?);
    let r = integrate_cpn(nn, terms.len().max(1), opts, |p| {
        let geo = fs_metric_at(p);
        let u = phi.jet(p);
        let (v, lap, grad) = (u.value, geo.laplacian(&u), geo.inner_gradients(&u, &u));
        if terms.is_empty() {
            return vec![0.0];
        }
        terms
            .iter()
            .map(|(m, _)| {
                v.powi(m.exp(Gen::Phi) as i32)
                    * lap.powi(m.exp(Gen::LapPhi) as i32)
                    * grad.powi(m.exp(Gen::GradSq) as i32)
            })
            .collect()
    })?;
    Ok(terms.iter().zip(&r.values).map(|((_, c), v)| c * v).sum())
}

#[cfg(test)]
mod tests;
