//! Exact polynomials in `z, z̄` on `C^m` with complex rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(k: i64) -> Rational {
    BigRational::from_integer(BigInt::from(k))
}

pub fn real(r: Rational) -> ComplexRational {
    Complex::new(r, Rational::zero())
}

pub fn imag(r: Rational) -> ComplexRational {
    Complex::new(Rational::zero(), r)
}

/// Rational serialized as `{"num": "…", "den": "…"}` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRational(pub Rational);

impl ExactRational {
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl serde::Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &self.0.numer().to_string())?;
        st.serialize_field("den", &self.0.denom().to_string())?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for ExactRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            num: String,
            den: String,
        }
        let raw = Raw::deserialize(d)?;
        let num: BigInt = raw.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = raw.den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }
}

/// Exponents of `z` and `z̄` in one monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Monomial {
    pub fn one(m: usize) -> Self {
        Self {
            z: vec![0; m],
            zbar: vec![0; m],
        }
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.z.iter().sum(), self.zbar.iter().sum())
    }

    fn times(&self, other: &Self) -> Self {
        Self {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            zbar: self.zbar.iter().zip(&other.zbar).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Symmetries of `C^m` that preserve the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `z_j ↦ −z_j`
    Negate(usize),
    /// `z_j ↦ i z_j`
    MultiplyByI(usize),
}

/// A polynomial `Σ c_{a,b} z^a z̄^b` on `C^m`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BihomogeneousPolynomial {
    vars: usize,
    terms: BTreeMap<Monomial, ComplexRational>,
}

impl BihomogeneousPolynomial {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: ComplexRational) -> Self {
        Self::monomial(Monomial::one(vars), c)
    }

    pub fn monomial(mono: Monomial, c: ComplexRational) -> Self {
        assert_eq!(mono.z.len(), mono.zbar.len(), "exponent vectors differ in length");
        let mut p = Self::zero(mono.z.len());
        p.add_term(mono, c);
        p
    }

    /// `z_j`.
    pub fn z(vars: usize, j: usize) -> Self {
        let mut m = Monomial::one(vars);
        m.z[j] = 1;
        Self::monomial(m, real(Rational::one()))
    }

    /// `z̄_j`.
    pub fn zbar(vars: usize, j: usize) -> Self {
        let mut m = Monomial::one(vars);
        m.zbar[j] = 1;
        Self::monomial(m, real(Rational::one()))
    }

    /// `|z_j|²`.
    pub fn abs_sq(vars: usize, j: usize) -> Self {
        Self::z(vars, j) * Self::zbar(vars, j)
    }

    /// `r² = Σ |z_j|²`.
    pub fn r_squared(vars: usize) -> Self {
        (0..vars).fold(Self::zero(vars), |acc, j| acc + Self::abs_sq(vars, j))
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> ComplexRational {
        self.terms.get(mono).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: ComplexRational) {
        assert_eq!(mono.z.len(), self.vars, "monomial has wrong number of variables");
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        Self {
            vars: self.vars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.vars, real(Rational::one())), |acc, _| {
            acc * self.clone()
        })
    }

    /// `(p, q)` if every term has degree `p` in `z` and `q` in `z̄`; `None` for
    /// the zero polynomial or mixed degrees.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(Monomial::degrees);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// True for bidegree `(k, k)`; the zero polynomial qualifies for every `k`.
    pub fn is_bihomogeneous(&self, k: u32) -> bool {
        self.is_zero() || self.bidegree() == Some((k, k))
    }

    /// Complex conjugate polynomial, `conj(P(z))`.
    pub fn conjugate(&self) -> Self {
        Self {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    (
                        Monomial {
                            z: k.zbar.clone(),
                            zbar: k.z.clone(),
                        },
                        v.conj(),
                    )
                })
                .collect(),
        }
    }

    /// Real-valued on `C^m` iff the coefficients are conjugate-symmetric.
    pub fn is_real_valued(&self) -> bool {
        *self == self.conjugate()
    }

    /// `∂/∂z_j`.
    pub fn d_z(&self, j: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (k, v) in &self.terms {
            if k.z[j] > 0 {
                let mut m = k.clone();
                m.z[j] -= 1;
                out.add_term(m, v * real(int(k.z[j] as i64)));
            }
        }
        out
    }

    /// `∂/∂z̄_j`.
    pub fn d_zbar(&self, j: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (k, v) in &self.terms {
            if k.zbar[j] > 0 {
                let mut m = k.clone();
                m.zbar[j] -= 1;
                out.add_term(m, v * real(int(k.zbar[j] as i64)));
            }
        }
        out
    }

    /// `Σ_j ∂²/∂z_j∂z̄_j`, a quarter of the flat Laplacian.
    pub fn complex_laplacian(&self) -> Self {
        (0..self.vars).fold(Self::zero(self.vars), |acc, j| acc + self.d_z(j).d_zbar(j))
    }

    /// Flat Laplacian `Σ_j (∂²/∂x_j² + ∂²/∂y_j²) = 4 Σ_j ∂_j ∂̄_j` on `C^m = R^{2m}`.
    pub fn flat_laplacian(&self) -> Self {
        self.complex_laplacian().scale(&real(int(4)))
    }

    pub fn apply_symmetry(&self, sym: Symmetry) -> Self {
        let mut out = Self::zero(self.vars);
        for (k, v) in &self.terms {
            let factor = match sym {
                Symmetry::Negate(j) => {
                    if (k.z[j] + k.zbar[j]) % 2 == 0 {
                        real(int(1))
                    } else {
                        real(int(-1))
                    }
                }
                Symmetry::MultiplyByI(j) => {
                    // (i z)^a (−i z̄)^b = i^{a−b} z^a z̄^b
                    match (k.z[j] as i64 - k.zbar[j] as i64).rem_euclid(4) {
                        0 => real(int(1)),
                        1 => imag(int(1)),
                        2 => real(int(-1)),
                        _ => imag(int(-1)),
                    }
                }
            };
            out.add_term(k.clone(), v * factor);
        }
        out
    }

    /// Evaluates at `z` given as `(re, im)` pairs.
    pub fn evaluate(&self, z: &[(f64, f64)]) -> Complex<f64> {
        assert_eq!(z.len(), self.vars, "wrong number of variables");
        let zc: Vec<Complex<f64>> = z.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        self.terms
            .iter()
            .map(|(k, v)| {
                let mut t = Complex::new(v.re.to_f64().unwrap(), v.im.to_f64().unwrap());
                for (j, zj) in zc.iter().enumerate() {
                    t *= zj.powu(k.z[j]) * zj.conj().powu(k.zbar[j]);
                }
                t
            })
            .sum()
    }
}

impl Add for BihomogeneousPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.vars, rhs.vars, "variable count mismatch");
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
        self
    }
}

impl Neg for BihomogeneousPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&real(int(-1)))
    }
}

impl Sub for BihomogeneousPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for BihomogeneousPolynomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.vars, rhs.vars, "variable count mismatch");
        let mut out = Self::zero(self.vars);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.times(b), x * y);
            }
        }
        out
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: terms in monomial order, `z` exponents then `z̄` exponents.
impl fmt::Display for BihomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "(")?;
            fmt_rational(&v.re, f)?;
            if !v.im.is_zero() {
                write!(f, ", ")?;
                fmt_rational(&v.im, f)?;
                write!(f, "i")?;
            }
            write!(f, ")")?;
            for (j, &e) in k.z.iter().enumerate() {
                if e > 0 {
                    write!(f, "*z{j}^{e}")?;
                }
            }
            for (j, &e) in k.zbar.iter().enumerate() {
                if e > 0 {
                    write!(f, "*zb{j}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = BihomogeneousPolynomial;

    #[test]
    fn cancellation_removes_terms() {
        let p = P::abs_sq(3, 0) - P::abs_sq(3, 0);
        assert!(p.is_zero());
        assert_eq!(p.bidegree(), None);
    }

    #[test]
    fn bidegree_and_reality() {
        let f = P::z(3, 0) * P::zbar(3, 1) + P::z(3, 1) * P::zbar(3, 0);
        assert_eq!(f.bidegree(), Some((1, 1)));
        assert!(f.is_real_valued());
        assert!(!(P::z(3, 0) * P::zbar(3, 1)).is_real_valued());
        assert!(!(P::z(3, 0) + P::abs_sq(3, 1)).is_bihomogeneous(1));
    }

    #[test]
    fn laplacian_of_r_squared() {
        // Δ r² = 2·(real dimension)
        let r2 = P::r_squared(3);
        assert_eq!(r2.flat_laplacian(), P::constant(3, real(int(12))));
        assert!((P::z(3, 0) * P::zbar(3, 1)).flat_laplacian().is_zero());
    }

    #[test]
    fn evaluation_matches_terms() {
        let f = P::z(2, 0) * P::zbar(2, 1) * P::abs_sq(2, 0);
        let z = [(0.3, -0.2), (0.5, 0.7)];
        let z0 = Complex::new(0.3, -0.2);
        let z1 = Complex::new(0.5, 0.7);
        let expect = z0 * z1.conj() * z0.norm_sqr();
        assert!((f.evaluate(&z) - expect).norm() < 1e-15);
    }

    #[test]
    fn symmetries() {
        let f1 = P::z(3, 0) * P::zbar(3, 1) + P::z(3, 1) * P::zbar(3, 0);
        assert_eq!(f1.apply_symmetry(Symmetry::Negate(0)), -f1.clone());
        assert_eq!(
            P::abs_sq(3, 0).apply_symmetry(Symmetry::MultiplyByI(0)),
            P::abs_sq(3, 0)
        );
        let q = P::z(3, 1).pow(2) * P::zbar(3, 2).pow(2) * P::abs_sq(3, 0);
        assert_eq!(q.apply_symmetry(Symmetry::MultiplyByI(1)), -q);
    }

    #[test]
    fn canonical_text() {
        let f = P::z(2, 0) * P::zbar(2, 1).scale(&Complex::new(rat(1, 2), int(-3)));
        assert_eq!(f.to_string(), "(1/2, -3i)*z0^1*zb1^1");
        assert_eq!(P::zero(2).to_string(), "0");
    }
}
