//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to a fixed set of `dim` input variables. Arithmetic on jets
//! applies the chain rule exactly, so evaluating a rational expression on
//! seeded jets yields exact first and second derivatives up to round-off.
//!
//! A jet with an empty gradient is a constant; it combines with jets of any
//! dimension.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    /// `grad[i] = ∂_i`. Empty for constants.
    pub grad: Vec<T>,
    /// Row-major `hess[i * dim + j] = ∂_i ∂_j`. Empty for constants.
    pub hess: Vec<T>,
}

impl<T: Real> Jet2<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// The coordinate function `x_index` on `dim` variables, evaluated at `value`.
    pub fn variable(value: T, index: usize, dim: usize) -> Self {
        assert!(index < dim, "variable index out of range");
        let mut grad = vec![T::zero(); dim];
        grad[index] = T::one();
        Self {
            value,
            grad,
            hess: vec![T::zero(); dim * dim],
        }
    }

    /// Seeds one variable jet per coordinate of `x`.
    pub fn seed(x: &[T]) -> Vec<Self> {
        let d = x.len();
        x.iter().enumerate().map(|(i, &v)| Self::variable(v, i, d)).collect()
    }

    /// Builds a jet from explicit derivative data.
    pub fn from_parts(value: T, grad: Vec<T>, hess: Vec<T>) -> Self {
        assert_eq!(hess.len(), grad.len() * grad.len(), "hessian shape");
        Self { value, grad, hess }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty()
    }

    pub fn d(&self, i: usize) -> T {
        self.grad.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn dd(&self, i: usize, j: usize) -> T {
        if self.grad.is_empty() {
            T::zero()
        } else {
            self.hess[i * self.dim() + j]
        }
    }

    /// Promotes a constant to an explicit jet of dimension `dim`.
    pub fn with_dim(mut self, dim: usize) -> Self {
        if self.grad.is_empty() && dim > 0 {
            self.grad = vec![T::zero(); dim];
            self.hess = vec![T::zero(); dim * dim];
        }
        self
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            value: self.value * c,
            grad: self.grad.iter().map(|&g| g * c).collect(),
            hess: self.hess.iter().map(|&h| h * c).collect(),
        }
    }

    /// `1 / self`.
    pub fn recip(&self) -> Self {
        let r = T::one() / self.value;
        let r2 = r * r;
        let r3 = r2 * r;
        let d = self.dim();
        let grad = self.grad.iter().map(|&g| -g * r2).collect();
        let mut hess = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                hess[i * d + j] =
                    -self.hess[i * d + j] * r2 + (self.grad[i] * self.grad[j] + self.grad[i] * self.grad[j]) * r3;
            }
        }
        Self { value: r, grad, hess }
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn common_dim(&self, other: &Self) -> usize {
        match (self.dim(), other.dim()) {
            (0, d) | (d, 0) => d,
            (a, b) => {
                assert_eq!(a, b, "jet dimension mismatch");
                a
            }
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> (Vec<T>, Vec<T>) {
        let d = self.common_dim(other);
        if d == 0 {
            return (Vec::new(), Vec::new());
        }
        let grad = (0..d).map(|i| f(self.d(i), other.d(i))).collect();
        let hess = (0..d * d)
            .map(|k| f(self.dd(k / d, k % d), other.dd(k / d, k % d)))
            .collect();
        (grad, hess)
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (grad, hess) = self.zip_with(&rhs, |a, b| a + b);
        Self {
            value: self.value + rhs.value,
            grad,
            hess,
        }
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (grad, hess) = self.zip_with(&rhs, |a, b| a - b);
        Self {
            value: self.value - rhs.value,
            grad,
            hess,
        }
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_constant() {
            return rhs.scale(self.value);
        }
        if rhs.is_constant() {
            return self.scale(rhs.value);
        }
        let d = self.common_dim(&rhs);
        let (u, v) = (self.value, rhs.value);
        let grad = (0..d).map(|i| u * rhs.grad[i] + v * self.grad[i]).collect();
        let mut hess = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                hess[k] = u * rhs.hess[k] + v * self.hess[k] + self.grad[i] * rhs.grad[j] + rhs.grad[i] * self.grad[j];
            }
        }
        Self {
            value: u * v,
            grad,
            hess,
        }
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        if rhs.is_constant() {
            return self.scale(T::one() / rhs.value);
        }
        self * rhs.recip()
    }
}

impl<T: Real> Zero for Jet2<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(|g| g.is_zero()) && self.hess.iter().all(|h| h.is_zero())
    }
}

impl<T: Real> One for Jet2<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        // f(x, y) = x^2 y / (1 + y)
        let v = Jet2::seed(&[1.5_f64, 0.5]);
        let (x, y) = (v[0].clone(), v[1].clone());
        let f = x.clone() * x.clone() * y.clone() / (Jet2::one() + y.clone());
        let (xv, yv) = (1.5_f64, 0.5_f64);
        assert!((f.value - xv * xv * yv / (1.0 + yv)).abs() < 1e-15);
        // ∂x f = 2 x y / (1+y), ∂y f = x^2 / (1+y)^2
        assert!((f.d(0) - 2.0 * xv * yv / (1.0 + yv)).abs() < 1e-14);
        assert!((f.d(1) - xv * xv / (1.0 + yv).powi(2)).abs() < 1e-14);
        // ∂y∂y f = -2 x^2 / (1+y)^3, ∂x∂y f = 2x/(1+y)^2
        assert!((f.dd(1, 1) + 2.0 * xv * xv / (1.0 + yv).powi(3)).abs() < 1e-14);
        assert!((f.dd(0, 1) - 2.0 * xv / (1.0 + yv).powi(2)).abs() < 1e-14);
        assert!((f.dd(1, 0) - f.dd(0, 1)).abs() < 1e-15);
    }

    #[test]
    fn constants_broadcast() {
        let x = Jet2::variable(2.0_f64, 0, 3);
        let c = Jet2::constant(5.0);
        let s = c.clone() + x.clone();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.d(0), 1.0);
        let p = x * c;
        assert_eq!(p.d(0), 5.0);
        assert_eq!(p.dd(0, 0), 0.0);
    }
}
