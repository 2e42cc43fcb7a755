//! Univariate rational functions over Q in the symbol `n`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polynomial::{int, Rational};

/// Polynomial in `n`, coefficients from the constant term up, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// The symbol `n`.
    pub fn n() -> Self {
        Poly(vec![Rational::zero(), Rational::one()])
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.0
    }

    fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Poly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading();
        let mut r = self.clone();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = r.leading() / &lead;
            let shift = rd - dd;
            for (i, dc) in d.0.iter().enumerate() {
                r.0[i + shift] = &r.0[i + shift] - &c * dc;
            }
            q[shift] = c;
            r = r.trimmed();
        }
        (Poly(q).trimmed(), r)
    }

    fn monic(&self) -> Self {
        let l = self.leading();
        self.scale(&(Rational::one() / l))
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn term_count(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let len = self.0.len().max(o.0.len());
        let z = Rational::zero();
        Poly(
            (0..len)
                .map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z))
                .collect(),
        )
        .trimmed()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Poly(out).trimmed()
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let body = match k {
                0 => fmt_rational(&mag),
                _ => {
                    let var = if k == 1 { "n".to_string() } else { format!("n^{k}") };
                    if mag.is_one() {
                        var
                    } else {
                        format!("{}*{var}", fmt_rational(&mag))
                    }
                }
            };
            f.write_str(&body)?;
        }
        Ok(())
    }
}

/// `num / den` with `den` monic and coprime to `num`; zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let l = den.leading();
        let inv = Rational::one() / l;
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn int(k: i64) -> Self {
        Self::constant(int(k))
    }

    /// The symbol `n`.
    pub fn n() -> Self {
        RatFunc {
            num: Poly::n(),
            den: Poly::constant(Rational::one()),
        }
    }

    /// `a + b n`.
    pub fn affine(a: Rational, b: Rational) -> Self {
        &Self::constant(a) + &(&Self::constant(b) * &Self::n())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(RatFunc::new(self.den.clone(), self.num.clone()))
        }
    }

    /// Value at `n = x`; `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let ev = |p: &Poly| p.0.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap());
        ev(&self.num) / ev(&self.den)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self * &o.recip().expect("division by zero rational function")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            if p.term_count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::rat;

    fn nm(k: i64) -> RatFunc {
        &RatFunc::n() - &RatFunc::int(k)
    }

    #[test]
    fn normalizes() {
        let a = &(&nm(2) * &nm(3)) / &(&nm(3) * &RatFunc::int(2));
        assert_eq!(a, &nm(2) / &RatFunc::int(2));
        assert_eq!(a.to_string(), "1/2*n - 1");
        let z = &nm(2) - &nm(2);
        assert!(z.is_zero());
        assert_eq!(z, RatFunc::zero());
    }

    #[test]
    fn display_and_eval() {
        let r = &nm(2) / &nm(1);
        assert_eq!(r.to_string(), "(n - 2)/(n - 1)");
        assert_eq!(r.eval(&int(4)), Some(rat(2, 3)));
        assert_eq!(r.eval(&int(1)), None);
        assert_eq!(
            (&(&RatFunc::n() * &RatFunc::n()) - &RatFunc::int(7)).to_string(),
            "n^2 - 7"
        );
    }

    #[test]
    fn gcd_is_monic() {
        let a = &Poly::n() * &Poly::n();
        let b = Poly::n().scale(&int(3));
        assert_eq!(Poly::gcd(&a, &b), Poly::n());
    }
}
