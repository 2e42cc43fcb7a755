//! Exact averages of polynomials over odd-dimensional spheres and their
//! pushforward to CP^N.
//!
//! All averages are normalized by the sphere volume. For `S^{2m−1} ⊂ C^m`,
//! `avg(z^a z̄^b) = 0` unless `a = b`, and
//! `avg(|z^a|²) = Π a_j! · (m−1)! / (m−1+|a|)!`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomial::{BihomogeneousPolynomial, ComplexRational, Rational, Symmetry};
use crate::quadrature::{integrate_cpn_scalar, QuadratureOptions, QuadratureResult};
use crate::sampling::shard_rng;
use crate::spectral::HermitianForm;

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Average of `z^a z̄^b` over `S^{2m−1}`.
pub fn monomial_average(m: usize, a: &[u32], b: &[u32]) -> Rational {
    assert!(m >= 1, "sphere in C^m needs m >= 1");
    assert!(a.len() == m && b.len() == m, "exponent vectors must have length m");
    if a != b {
        return Rational::zero();
    }
    let total: u64 = a.iter().map(|&x| x as u64).sum();
    let num = a.iter().fold(BigInt::one(), |acc, &x| acc * factorial(x as u64)) * factorial(m as u64 - 1);
    BigRational::new(num, factorial(m as u64 - 1 + total))
}

/// Complex average of `P` over the unit sphere of its ambient space.
pub fn polynomial_average_complex(p: &BihomogeneousPolynomial) -> ComplexRational {
    let m = p.vars();
    p.terms()
        .map(|(mono, c)| c * Complex::new(monomial_average(m, &mono.z, &mono.zbar), Rational::zero()))
        .fold(Complex::zero(), |acc, t| acc + t)
}

/// Real average of `P`; errors when the average has an imaginary part.
pub fn polynomial_average(p: &BihomogeneousPolynomial) -> Result<Rational> {
    let v = polynomial_average_complex(p);
    if !v.im.is_zero() {
        return Err(Error::NotRealValued);
    }
    Ok(v.re)
}

/// True iff the symmetry maps `P` to `−P`, which forces a zero average.
pub fn symmetry_vanishing(p: &BihomogeneousPolynomial, sym: Symmetry) -> bool {
    p.apply_symmetry(sym) == -p.clone()
}

/// Average of `φ_A^q` over CP^N, computed as the sphere average of `(z*Az)^q`
/// on `S^{2N+1}`.
pub fn cpn_average(q: u32, form: &HermitianForm) -> Result<Rational> {
    polynomial_average(&form.to_polynomial().pow(q))
}

/// `Vol(CP^N) = π^N / N!` in the metric with `g(0) = I`.
pub fn cpn_volume_closed_form(n: usize) -> f64 {
    PI.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>()
}

/// `Vol(CP^N)` by chart quadrature of the metric volume density.
pub fn cpn_volume(n: usize, opts: QuadratureOptions) -> Result<QuadratureResult> {
    integrate_cpn_scalar(n, opts, |_| 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `|mean − exact|` in units of the standard error.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = (self.mean - exact).abs();
        if self.std_error == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.std_error
        }
    }
}

/// Minimum sample count accepted by [`monte_carlo_average`].
pub const MIN_MC_SAMPLES: usize = 10_000;
const SHARD: usize = 1 << 14;

/// Monte Carlo estimate of the sphere average of a real-valued `P`, from
/// normalized Gaussian vectors. Shard `k` draws from stream `k` of `seed`.
pub fn monte_carlo_average(p: &BihomogeneousPolynomial, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: samples,
        });
    }
    if !p.is_real_valued() {
        return Err(Error::NotRealValued);
    }
    let m = p.vars();
    let terms: Vec<(f64, f64, Vec<u32>, Vec<u32>)> = p
        .terms()
        .map(|(k, c)| {
            use num_traits::ToPrimitive;
            (
                c.re.to_f64().unwrap(),
                c.im.to_f64().unwrap(),
                k.z.clone(),
                k.zbar.clone(),
            )
        })
        .collect();
    let shards = samples.div_ceil(SHARD);
    let sums: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD.min(samples - s * SHARD);
            let mut rng = shard_rng(seed, s as u64);
            let mut z = vec![Complex::new(0.0, 0.0); m];
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..count {
                let mut norm2 = 0.0;
                for zj in z.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *zj = Complex::new(re, im);
                    norm2 += re * re + im * im;
                }
                let inv = norm2.sqrt().recip();
                for zj in z.iter_mut() {
                    *zj *= inv;
                }
                let v: f64 = terms
                    .iter()
                    .map(|(re, im, a, b)| {
                        let mut t = Complex::new(*re, *im);
                        for j in 0..m {
                            t *= z[j].powu(a[j]) * z[j].conj().powu(b[j]);
                        }
                        t.re
                    })
                    .sum();
                sum += v;
                sum2 += v * v;
            }
            (sum, sum2)
        })
        .collect();
    let (sum, sum2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = samples as f64;
    let mean = sum / nf;
    let var = ((sum2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / nf).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{int, rat};
    use crate::spectral::{basis_first_eigenspace, special_phi, EigenFunction};

    type P = BihomogeneousPolynomial;

    #[test]
    fn monomial_examples() {
        assert_eq!(monomial_average(3, &[1, 1, 1], &[1, 1, 1]), rat(1, 60));
        assert_eq!(monomial_average(3, &[1, 0, 0], &[0, 1, 0]), Rational::zero());
        assert_eq!(monomial_average(4, &[0; 4], &[0; 4]), Rational::one());
        // avg |z_1|² = 1/m
        assert_eq!(monomial_average(5, &[1, 0, 0, 0, 0], &[1, 0, 0, 0, 0]), rat(1, 5));
    }

    #[test]
    fn special_cube_averages() {
        let a = special_phi(2).unwrap();
        assert_eq!(cpn_average(3, &a).unwrap(), rat(1, 5));
        assert_eq!(cpn_average(2, &a).unwrap(), rat(1, 2));
        assert_eq!(cpn_average(1, &a).unwrap(), Rational::zero());
        assert_eq!(cpn_average(3, &special_phi(3).unwrap()).unwrap(), rat(1, 10));
    }

    #[test]
    fn basis_forms_have_zero_mean() {
        for a in basis_first_eigenspace(3).unwrap() {
            assert!(cpn_average(1, &a).unwrap().is_zero());
        }
    }

    #[test]
    fn non_real_average_is_rejected() {
        let p = P::abs_sq(2, 0).scale(&Complex::new(int(0), int(1)));
        assert_eq!(polynomial_average(&p), Err(Error::NotRealValued));
    }

    #[test]
    fn monte_carlo_constant_is_exact() {
        let one = P::constant(3, Complex::new(int(1), int(0)));
        let e = monte_carlo_average(&one, 20_000, 1).unwrap();
        assert!((e.mean - 1.0).abs() < 1e-12);
        assert!(monte_carlo_average(&one, 100, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let f = special_phi(2).unwrap().to_polynomial();
        let a = monte_carlo_average(&f, 50_000, 9).unwrap();
        let b = monte_carlo_average(&f, 50_000, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.z_score(0.0) < 3.0);
    }

    #[test]
    fn pushforward_matches_chart_quadrature() {
        let a = special_phi(2).unwrap();
        let phi = EigenFunction::<f64>::new(a.clone());
        let r = integrate_cpn_scalar(2, QuadratureOptions::default(), |p| phi.value(p).powi(3)).unwrap();
        let avg = r.value() / cpn_volume_closed_form(2);
        assert!((avg - 0.2).abs() < 1e-10, "{avg}");
    }
}
