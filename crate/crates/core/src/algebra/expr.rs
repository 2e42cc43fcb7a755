//! Coefficients in `Q(n)[τ, 1/τ]` and polynomial expressions in the
//! generators `φ, Δφ, |∇φ|², f″, Δf″, τ″`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::polynomial::Rational;

use super::ratfunc::RatFunc;

/// Laurent polynomial in `τ` with coefficients in `Q(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Coeff(BTreeMap<i32, RatFunc>);

impl Coeff {
    pub fn zero() -> Self {
        Coeff(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::from(RatFunc::one())
    }

    /// `r τ^k`.
    pub fn tau_pow(r: RatFunc, k: i32) -> Self {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(k, r);
        }
        Coeff(m)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from(RatFunc::constant(c))
    }

    pub fn int(k: i64) -> Self {
        Self::from(RatFunc::int(k))
    }

    pub fn n() -> Self {
        Self::from(RatFunc::n())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &RatFunc)> {
        self.0.iter().map(|(k, r)| (*k, r))
    }

    /// Coefficient of `τ^k`.
    pub fn at(&self, k: i32) -> RatFunc {
        self.0.get(&k).cloned().unwrap_or_else(RatFunc::zero)
    }

    fn add_in(&mut self, k: i32, r: RatFunc) {
        match self.0.entry(k) {
            Entry::Vacant(v) => {
                if !r.is_zero() {
                    v.insert(r);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &r;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Inverse, when the coefficient is a single `r τ^k`.
    pub fn recip(&self) -> Option<Self> {
        if self.0.len() != 1 {
            return None;
        }
        let (k, r) = self.0.iter().next().unwrap();
        Some(Coeff::tau_pow(r.recip()?, -k))
    }

    pub fn eval_f64(&self, n: f64, tau: f64) -> f64 {
        self.0.iter().map(|(k, r)| r.eval_f64(n) * tau.powi(*k)).sum()
    }

    /// Substitutes `n = x` into every coefficient.
    pub fn specialize(&self, x: &Rational) -> Result<Self> {
        let mut out = Coeff::zero();
        for (k, r) in &self.0 {
            let v = r.eval(x).ok_or_else(|| Error::Invalid(format!("pole at n = {x}")))?;
            out.add_in(*k, RatFunc::constant(v));
        }
        Ok(out)
    }
}

impl From<RatFunc> for Coeff {
    fn from(r: RatFunc) -> Self {
        Coeff::tau_pow(r, 0)
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        let mut out = self.clone();
        for (k, r) in &o.0 {
            out.add_in(*k, r.clone());
        }
        out
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff(self.0.iter().map(|(k, r)| (*k, -r)).collect())
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        let mut out = Coeff::zero();
        for (a, ra) in &self.0 {
            for (b, rb) in &o.0 {
                out.add_in(a + b, ra * rb);
            }
        }
        out
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(k, r)| {
                let rs = r.to_string();
                let wrapped = if rs.contains(' ') {
                    format!("({rs})")
                } else {
                    rs.clone()
                };
                match k {
                    0 if self.0.len() == 1 => rs,
                    0 => wrapped,
                    1 => format!("{wrapped}*tau"),
                    _ => format!("{wrapped}*tau^{k}"),
                }
            })
            .collect();
        if parts.len() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

/// Generators, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Phi,
    LapPhi,
    GradSq,
    FSecond,
    LapFSecond,
    TauSecond,
}

impl Gen {
    pub const ALL: [Gen; 6] = [
        Gen::Phi,
        Gen::LapPhi,
        Gen::GradSq,
        Gen::FSecond,
        Gen::LapFSecond,
        Gen::TauSecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gen::Phi => "phi",
            Gen::LapPhi => "lap(phi)",
            Gen::GradSq => "|grad phi|^2",
            Gen::FSecond => "f''",
            Gen::LapFSecond => "lap(f'')",
            Gen::TauSecond => "tau''",
        }
    }
}

/// Exponents of the generators, indexed as [`Gen::ALL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(pub [u32; 6]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; 6])
    }

    pub fn of(g: Gen) -> Self {
        Self::one().with(g, 1)
    }

    pub fn exp(&self, g: Gen) -> u32 {
        self.0[g as usize]
    }

    pub fn with(mut self, g: Gen, e: u32) -> Self {
        self.0[g as usize] = e;
        self
    }

    pub fn times(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for i in 0..6 {
            m.0[i] += o.0[i];
        }
        m
    }

    /// True when every generator outside `allowed` has exponent zero.
    pub fn only(&self, allowed: &[Gen]) -> bool {
        Gen::ALL.iter().all(|g| allowed.contains(g) || self.exp(*g) == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Gen::ALL
            .iter()
            .filter(|g| self.exp(**g) > 0)
            .map(|g| match self.exp(*g) {
                1 => g.name().to_string(),
                e => format!("{}^{e}", g.name()),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Polynomial in the generators. Read pointwise, or as the formal
/// integral `∫ (·) dV` of each term when wrapped in [`IntegralExpr`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expr(BTreeMap<Mono, Coeff>);

impl Expr {
    pub fn zero() -> Self {
        Expr(BTreeMap::new())
    }

    pub fn term(c: Coeff, m: Mono) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn gen(g: Gen) -> Self {
        Self::term(Coeff::one(), Mono::of(g))
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(c, Mono::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Coeff) {
        match self.0.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Coeff)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, m: &Mono) -> Coeff {
        self.0.get(m).cloned().unwrap_or_default()
    }

    pub fn remove(&mut self, m: &Mono) -> Option<Coeff> {
        self.0.remove(m)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.0 {
            out.add_term(*m, x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Expr::constant(Coeff::one()), |acc, _| &acc * self)
    }

    /// `f″` and `Δf″` enter at most linearly.
    pub fn check_linear_in_f(&self) -> Result<()> {
        for m in self.0.keys() {
            if m.exp(Gen::FSecond) + m.exp(Gen::LapFSecond) > 1 {
                return Err(Error::Invalid(format!("term {m} is not linear in f''")));
            }
        }
        Ok(())
    }

    pub fn specialize(&self, x: &Rational) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            out.add_term(*m, c.specialize(x)?);
        }
        Ok(out)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(self.0.iter().map(|(m, c)| (*m, -c)).collect())
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        self + &(-o)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &o.0 {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

fn join_terms(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: impl Fn(&Mono) -> String) -> fmt::Result {
    if e.0.is_empty() {
        return f.write_str("0");
    }
    let parts: Vec<String> =
        e.0.iter()
            .rev()
            .map(|(m, c)| {
                let cs = c.to_string();
                let cs = if cs.contains(' ') && !cs.starts_with('(') {
                    format!("({cs})")
                } else {
                    cs
                };
                format!("{cs} * {}", wrap(m))
            })
            .collect();
    f.write_str(&parts.join(" + "))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join_terms(f, self, |m| m.to_string())
    }
}

/// Formal sum of integrals `Σ c_m ∫ m dV` over CP^N.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntegralExpr(pub Expr);

impl IntegralExpr {
    pub fn zero() -> Self {
        IntegralExpr(Expr::zero())
    }

    /// `∫ e dV`, term by term.
    pub fn integrate(e: Expr) -> Self {
        IntegralExpr(e)
    }

    pub fn of(c: Coeff, m: Mono) -> Self {
        IntegralExpr(Expr::term(c, m))
    }

    pub fn coefficient(&self, m: &Mono) -> Coeff {
        self.0.coefficient(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        IntegralExpr(self.0.scale(c))
    }

    /// Canonical text: terms in descending monomial order.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl Add for &IntegralExpr {
    type Output = IntegralExpr;
    fn add(self, o: &IntegralExpr) -> IntegralExpr {
        IntegralExpr(&self.0 + &o.0)
    }
}

impl Sub for &IntegralExpr {
    type Output = IntegralExpr;
    fn sub(self, o: &IntegralExpr) -> IntegralExpr {
        IntegralExpr(&self.0 - &o.0)
    }
}

impl fmt::Display for IntegralExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join_terms(f, &self.0, |m| format!("int[{m}]"))
    }
}

/// `φ^k` as a monomial.
pub fn phi_pow(k: u32) -> Mono {
    Mono::one().with(Gen::Phi, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::rat;

    #[test]
    fn laurent_arithmetic() {
        let a = &Coeff::tau_pow(RatFunc::n(), -1) + &Coeff::int(2);
        let b = Coeff::tau_pow(RatFunc::int(1), 1);
        let p = &a * &b;
        assert_eq!(p, &Coeff::n() + &Coeff::tau_pow(RatFunc::int(2), 1));
        assert!(a.recip().is_none());
        let t = Coeff::tau_pow(RatFunc::constant(rat(-1, 2)), -1);
        assert_eq!(&t * &t.recip().unwrap(), Coeff::one());
        assert_eq!(t.to_string(), "-1/2*tau^-1");
    }

    #[test]
    fn expression_product_and_text() {
        let phi = Expr::gen(Gen::Phi);
        let lap = Expr::gen(Gen::LapPhi);
        let e = &(&phi * &phi) * &lap;
        assert_eq!(e.to_string(), "1 * phi^2*lap(phi)");
        let i = IntegralExpr::integrate(&e.scale(&Coeff::n()) - &phi.pow(3));
        assert_eq!(i.to_string(), "-1 * int[phi^3] + n * int[phi^2*lap(phi)]");
        assert!((&(&phi * &Expr::gen(Gen::FSecond)) * &Expr::gen(Gen::LapFSecond))
            .check_linear_in_f()
            .is_err());
    }
}
