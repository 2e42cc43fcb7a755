//! The rewrite rules. Each acts on one integral term `c ∫ m dV` and returns
//! its replacement, or `None` when the term is not a redex.

use num_traits::One;
use serde::Serialize;

use crate::polynomial::{int, Rational};

use super::expr::{Coeff, Expr, Gen, IntegralExpr, Mono};
use super::ratfunc::RatFunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `Δφ → −φ/τ`.
    Eigen,
    /// `∫ φ^k Δf″ → ∫ Δ(φ^k) f″`, `k ≤ 1` after expansion.
    SelfAdjoint,
    /// `∫ φ^k |∇φ|² → −(1/(k+1)) ∫ φ^{k+1} Δφ`.
    GradientReduction,
    /// `∫ φ (τ″)^j → 0`.
    ZeroMean,
    /// `∫ φ f″` and `∫ φ Δf″` by their solved values.
    EliminateFSecond,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::Eigen,
        Rule::SelfAdjoint,
        Rule::GradientReduction,
        Rule::ZeroMean,
        Rule::EliminateFSecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Eigen => "eigen",
            Rule::SelfAdjoint => "self_adjoint",
            Rule::GradientReduction => "gradient_reduction",
            Rule::ZeroMean => "zero_mean",
            Rule::EliminateFSecond => "eliminate_f_second",
        }
    }
}

/// Solved values of the two `f″` integrals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSecondValues {
    /// `∫ φ f″`.
    pub phi_f: IntegralExpr,
    /// `∫ φ Δf″`.
    pub phi_lap_f: IntegralExpr,
}

/// `−1/τ`.
pub fn minus_inv_tau() -> Coeff {
    Coeff::tau_pow(RatFunc::int(-1), -1)
}

/// Replacement for `c ∫ m` under `rule`.
pub fn rewrite(rule: Rule, m: &Mono, c: &Coeff, f_values: Option<&FSecondValues>) -> Option<IntegralExpr> {
    let k = m.exp(Gen::Phi);
    let t = m.exp(Gen::TauSecond);
    match rule {
        Rule::Eigen => {
            let a = m.exp(Gen::LapPhi);
            if a == 0 {
                return None;
            }
            let mut factor = Coeff::one();
            for _ in 0..a {
                factor = &factor * &minus_inv_tau();
            }
            let nm = m.with(Gen::LapPhi, 0).with(Gen::Phi, k + a);
            Some(IntegralExpr::of(c * &factor, nm))
        }
        Rule::SelfAdjoint => {
            if m.exp(Gen::LapFSecond) != 1 || !m.only(&[Gen::Phi, Gen::LapFSecond, Gen::TauSecond]) {
                return None;
            }
            // Δ(φ^k) = k φ^{k−1} Δφ + k(k−1) φ^{k−2} |∇φ|²
            let base = Mono::one().with(Gen::FSecond, 1).with(Gen::TauSecond, t);
            let mut e = Expr::zero();
            if k >= 1 {
                e.add_term(
                    base.with(Gen::Phi, k - 1).with(Gen::LapPhi, 1),
                    c * &Coeff::int(k as i64),
                );
            }
            if k >= 2 {
                e.add_term(
                    base.with(Gen::Phi, k - 2).with(Gen::GradSq, 1),
                    c * &Coeff::int((k * (k - 1)) as i64),
                );
            }
            Some(IntegralExpr(e))
        }
        Rule::GradientReduction => {
            if m.exp(Gen::GradSq) != 1 || !m.only(&[Gen::Phi, Gen::GradSq, Gen::TauSecond]) {
                return None;
            }
            let factor = Coeff::constant(-Rational::one() / int(k as i64 + 1));
            let nm = Mono::one()
                .with(Gen::Phi, k + 1)
                .with(Gen::LapPhi, 1)
                .with(Gen::TauSecond, t);
            Some(IntegralExpr::of(c * &factor, nm))
        }
        Rule::ZeroMean => {
            if k == 1 && m.only(&[Gen::Phi, Gen::TauSecond]) {
                Some(IntegralExpr::zero())
            } else {
                None
            }
        }
        Rule::EliminateFSecond => {
            let vals = f_values?;
            if k != 1 || !m.only(&[Gen::Phi, Gen::FSecond, Gen::LapFSecond, Gen::TauSecond]) {
                return None;
            }
            let tau2 = Expr::term(Coeff::one(), Mono::one().with(Gen::TauSecond, t));
            let base = match (m.exp(Gen::FSecond), m.exp(Gen::LapFSecond)) {
                (1, 0) => &vals.phi_f,
                (0, 1) => &vals.phi_lap_f,
                _ => return None,
            };
            Some(IntegralExpr(&base.0.scale(c) * &tau2))
        }
    }
}

/// Terms of `e` that `rule` rewrites.
pub fn redexes(rule: Rule, e: &IntegralExpr, f_values: Option<&FSecondValues>) -> Vec<Mono> {
    e.0.terms()
        .filter(|(m, c)| rewrite(rule, m, c, f_values).is_some())
        .map(|(m, _)| *m)
        .collect()
}

/// Applies `rule` to the single term `m` of `e`.
pub fn apply_at(rule: Rule, e: &IntegralExpr, m: &Mono, f_values: Option<&FSecondValues>) -> Option<IntegralExpr> {
    let c = e.coefficient(m);
    if c.is_zero() {
        return None;
    }
    let replacement = rewrite(rule, m, &c, f_values)?;
    let mut rest = e.0.clone();
    rest.remove(m);
    Some(&IntegralExpr(rest) + &replacement)
}

/// Applies `rule` to every redex of `e` once.
pub fn apply_rule(rule: Rule, e: &IntegralExpr, f_values: Option<&FSecondValues>) -> IntegralExpr {
    let mut out = IntegralExpr::zero();
    for (m, c) in e.0.terms() {
        match rewrite(rule, m, c, f_values) {
            Some(r) => out = &out + &r,
            None => out = &out + &IntegralExpr::of(c.clone(), *m),
        }
    }
    out
}
