//! First Laplace eigenspace of CP^N from trace-free Hermitian forms, and the
//! harmonic decomposition of bihomogeneous polynomials.

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::{fs_metric_at, ChartPoint, Tau};
use crate::jet::Jet2;
use crate::linalg;
use crate::moments;
use crate::polynomial::{int, real, BihomogeneousPolynomial, ComplexRational, Monomial, Rational};
use crate::scalar::{Field, Real};

/// Hermitian `(N+1)×(N+1)` matrix with exact complex rational entries,
/// defining `φ_A([z]) = z*Az / |z|²` on CP^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    size: usize,
    entries: Vec<ComplexRational>,
}

impl HermitianForm {
    /// Row-major entries; rejects non-Hermitian input.
    pub fn new(size: usize, entries: Vec<ComplexRational>) -> Result<Self> {
        if size < 2 {
            return Err(Error::Dimension {
                min: 1,
                got: size.saturating_sub(1),
            });
        }
        if entries.len() != size * size {
            return Err(Error::Invalid(format!(
                "expected {} entries, got {}",
                size * size,
                entries.len()
            )));
        }
        for j in 0..size {
            for k in 0..size {
                if entries[j * size + k] != entries[k * size + j].conj() {
                    return Err(Error::Invalid(format!("entry ({j}, {k}) breaks Hermitian symmetry")));
                }
            }
        }
        Ok(Self { size, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            size: n + 1,
            entries: vec![Complex::zero(); (n + 1) * (n + 1)],
        }
    }

    /// Real diagonal form.
    pub fn diagonal(diag: &[Rational]) -> Result<Self> {
        let size = diag.len();
        let mut e = vec![Complex::zero(); size * size];
        for (j, d) in diag.iter().enumerate() {
            e[j * size + j] = real(d.clone());
        }
        Self::new(size, e)
    }

    /// `E_jk + E_kj`.
    pub fn symmetric_unit(n: usize, j: usize, k: usize) -> Self {
        let mut a = Self::zero(n);
        a.entries[j * a.size + k] = real(Rational::one());
        a.entries[k * a.size + j] = real(Rational::one());
        a
    }

    /// `i(E_jk − E_kj)`.
    pub fn antisymmetric_unit(n: usize, j: usize, k: usize) -> Self {
        let mut a = Self::zero(n);
        a.entries[j * a.size + k] = Complex::new(Rational::zero(), Rational::one());
        a.entries[k * a.size + j] = Complex::new(Rational::zero(), -Rational::one());
        a
    }

    /// `E_jj − E_{j+1,j+1}`.
    pub fn diagonal_difference(n: usize, j: usize) -> Self {
        let mut a = Self::zero(n);
        a.entries[j * a.size + j] = real(Rational::one());
        a.entries[(j + 1) * a.size + j + 1] = real(-Rational::one());
        a
    }

    /// Complex dimension `N` of the projective space the form lives on.
    pub fn complex_dim(&self) -> usize {
        self.size - 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, j: usize, k: usize) -> &ComplexRational {
        &self.entries[j * self.size + k]
    }

    pub fn trace(&self) -> Rational {
        (0..self.size).fold(Rational::zero(), |s, j| s + &self.entries[j * self.size + j].re)
    }

    pub fn is_trace_free(&self) -> bool {
        self.trace().is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|e| e * real(c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.size, other.size, "form size mismatch");
        Self {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    /// Trace-free part `A − (tr A / (N+1)) I`.
    pub fn trace_free_part(&self) -> Self {
        let shift = self.trace() / int(self.size as i64);
        let mut out = self.clone();
        for j in 0..self.size {
            out.entries[j * self.size + j] = &out.entries[j * self.size + j] - real(shift.clone());
        }
        out
    }

    /// `f_A(z) = z*Az = Σ_jk A_jk z̄_j z_k` on `C^{N+1}`.
    pub fn to_polynomial(&self) -> BihomogeneousPolynomial {
        let m = self.size;
        let mut p = BihomogeneousPolynomial::zero(m);
        for j in 0..m {
            for k in 0..m {
                let c = &self.entries[j * m + k];
                if c.is_zero() {
                    continue;
                }
                let mut mono = Monomial::one(m);
                mono.zbar[j] += 1;
                mono.z[k] += 1;
                p.add_term(mono, c.clone());
            }
        }
        p
    }

    /// Real and imaginary parts of the entries as `T`.
    pub fn parts<T: Real>(&self) -> (Vec<T>, Vec<T>) {
        let conv = |r: &Rational| T::from_f64(r.to_f64().expect("finite entry")).expect("representable");
        (
            self.entries.iter().map(|e| conv(&e.re)).collect(),
            self.entries.iter().map(|e| conv(&e.im)).collect(),
        )
    }

    /// Frobenius norm, an upper bound for `max |φ_A|`.
    pub fn sup_bound(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.re.to_f64().unwrap().powi(2) + e.im.to_f64().unwrap().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `φ_A` in chart `chart`, evaluated on any field. `re` and `im` hold the
/// form entries; `coords` are the interleaved chart coordinates.
pub fn phi_generic<F: Field>(size: usize, re: &[F], im: &[F], chart: usize, coords: &[F]) -> F {
    let mut xs = Vec::with_capacity(size);
    let mut ys = Vec::with_capacity(size);
    let mut k = 0;
    for slot in 0..size {
        if slot == chart {
            xs.push(F::one());
            ys.push(F::zero());
        } else {
            xs.push(coords[2 * k].clone());
            ys.push(coords[2 * k + 1].clone());
            k += 1;
        }
    }
    let mut num = F::zero();
    let mut den = F::zero();
    for j in 0..size {
        let mod2 = xs[j].clone() * xs[j].clone() + ys[j].clone() * ys[j].clone();
        den = den + mod2.clone();
        if !re[j * size + j].is_zero() {
            num = num + re[j * size + j].clone() * mod2;
        }
        for l in j + 1..size {
            let (a, b) = (&re[j * size + l], &im[j * size + l]);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            // z̄_j z_l + conj = 2 Re(A_jl z̄_j z_l)
            let m = xs[j].clone() * xs[l].clone() + ys[j].clone() * ys[l].clone();
            let kk = xs[j].clone() * ys[l].clone() - ys[j].clone() * xs[l].clone();
            let two = F::one() + F::one();
            num = num + two * (a.clone() * m - b.clone() * kk);
        }
    }
    num / den
}

/// Evaluator for `φ_A` in a fixed scalar type.
#[derive(Clone, Debug)]
pub struct EigenFunction<T> {
    form: HermitianForm,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> EigenFunction<T> {
    pub fn new(form: HermitianForm) -> Self {
        let (re, im) = form.parts();
        Self { form, re, im }
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn value(&self, p: &ChartPoint<T>) -> T {
        phi_generic(self.form.size, &self.re, &self.im, p.chart(), p.coords())
    }

    /// Value with exact first and second coordinate derivatives.
    pub fn jet(&self, p: &ChartPoint<T>) -> Jet2<T> {
        self.jet_at(p.chart(), &Jet2::seed(p.coords()))
    }

    /// `φ_A` evaluated on arbitrary coordinate jets.
    pub fn jet_at(&self, chart: usize, coords: &[Jet2<T>]) -> Jet2<T> {
        let re: Vec<Jet2<T>> = self.re.iter().map(|&v| Jet2::constant(v)).collect();
        let im: Vec<Jet2<T>> = self.im.iter().map(|&v| Jet2::constant(v)).collect();
        phi_generic(self.form.size, &re, &im, chart, coords)
    }

    pub fn laplacian(&self, p: &ChartPoint<T>) -> T {
        fs_metric_at(p).laplacian(&self.jet(p))
    }
}

/// `value_at` for a one-off evaluation.
pub fn phi_value_at<T: Real>(form: &HermitianForm, p: &ChartPoint<T>) -> T {
    let (re, im) = form.parts::<T>();
    phi_generic(form.size, &re, &im, p.chart(), p.coords())
}

/// Elementary trace-free Hermitian basis: `E_jk + E_kj`, `i(E_jk − E_kj)`
/// for `j < k`, then `E_jj − E_{j+1,j+1}`. `N(N+2)` forms.
pub fn basis_first_eigenspace(n: usize) -> Result<Vec<HermitianForm>> {
    if n == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let mut out = Vec::with_capacity(n * (n + 2));
    for j in 0..=n {
        for k in j + 1..=n {
            out.push(HermitianForm::symmetric_unit(n, j, k));
            out.push(HermitianForm::antisymmetric_unit(n, j, k));
        }
    }
    for j in 0..n {
        out.push(HermitianForm::diagonal_difference(n, j));
    }
    Ok(out)
}

/// The form with ones in positions (1,2), (2,3), (3,1) and their mirrors,
/// zero elsewhere, so that `f_A = 2 Re(z₁z̄₂ + z₂z̄₃ + z₃z̄₁)`.
pub fn special_phi(n: usize) -> Result<HermitianForm> {
    if n < 2 {
        return Err(Error::RequiresTwo(n));
    }
    let a = HermitianForm::symmetric_unit(n, 0, 1)
        .add(&HermitianForm::symmetric_unit(n, 1, 2))
        .add(&HermitianForm::symmetric_unit(n, 2, 0));
    Ok(a)
}

/// `max_p |Δφ_A + φ_A/τ|` over `points`.
pub fn verify_eigen<T: Real>(form: &HermitianForm, tau: Tau<T>, points: &[ChartPoint<T>]) -> T {
    let phi = EigenFunction::<T>::new(form.clone());
    let lambda = tau.eigenvalue();
    points
        .iter()
        .map(|p| {
            let u = phi.jet(p);
            (fs_metric_at(p).laplacian(&u) + lambda * u.value).abs()
        })
        .fold(T::zero(), T::max)
}

/// Exact Gram matrix `⟨φ_A, φ_B⟩` of the forms under the normalized
/// L² inner product of CP^N, via sphere moments.
pub fn gram_matrix_exact(forms: &[HermitianForm]) -> Result<Vec<Rational>> {
    let polys: Vec<BihomogeneousPolynomial> = forms.iter().map(HermitianForm::to_polynomial).collect();
    let k = forms.len();
    let mut g = vec![Rational::zero(); k * k];
    for a in 0..k {
        for b in a..k {
            let v = moments::polynomial_average(&(polys[a].clone() * polys[b].clone()))?;
            g[a * k + b] = v.clone();
            g[b * k + a] = v;
        }
    }
    Ok(g)
}

/// Exact rank of [`gram_matrix_exact`].
pub fn gram_rank(forms: &[HermitianForm]) -> Result<usize> {
    let g = gram_matrix_exact(forms)?;
    Ok(linalg::rational_rank(&g, forms.len(), forms.len()))
}

/// `P = Σ_j r^{2j} h_{k−j}` with each `h_l` flat-harmonic of bidegree `(l, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicDecomposition {
    /// `components[l] = h_l`, `l = 0..=k`.
    pub components: Vec<BihomogeneousPolynomial>,
}

impl HarmonicDecomposition {
    pub fn degree(&self) -> usize {
        self.components.len() - 1
    }

    /// The harmonic part `H = h_k`.
    pub fn harmonic(&self) -> &BihomogeneousPolynomial {
        &self.components[self.degree()]
    }

    /// `Q` with `P = H + r² Q`.
    pub fn quotient(&self) -> BihomogeneousPolynomial {
        let k = self.degree();
        let m = self.components[0].vars();
        let r2 = BihomogeneousPolynomial::r_squared(m);
        (0..k).fold(BihomogeneousPolynomial::zero(m), |acc, l| {
            acc + r2.pow((k - 1 - l) as u32) * self.components[l].clone()
        })
    }

    /// The constant component `h_0`.
    pub fn constant_term(&self) -> ComplexRational {
        self.components[0].coefficient(&Monomial::one(self.components[0].vars()))
    }

    pub fn recompose(&self) -> BihomogeneousPolynomial {
        let m = self.components[0].vars();
        self.harmonic().clone() + BihomogeneousPolynomial::r_squared(m) * self.quotient()
    }
}

/// Largest bidegree [`harmonic_decomposition`] accepts.
pub const MAX_HARMONIC_DEGREE: usize = 3;

/// Splits `P` of bidegree `(k, k)` into flat-harmonic pieces.
///
/// With `L = Σ ∂_j ∂̄_j` on `C^m`, `L(r^{2j} h_l) = j(m + 2l + j − 1) r^{2j−2} h_l`,
/// so the pieces of `LP` determine every `h_l` with `l < k` and `h_k` is
/// the remainder.
pub fn harmonic_decomposition(p: &BihomogeneousPolynomial, k: usize) -> Result<HarmonicDecomposition> {
    if k > MAX_HARMONIC_DEGREE {
        return Err(Error::UnsupportedDegree {
            k,
            max: MAX_HARMONIC_DEGREE,
        });
    }
    if !p.is_bihomogeneous(k as u32) {
        return Err(Error::NotBihomogeneous { k });
    }
    Ok(HarmonicDecomposition {
        components: decompose(p, k),
    })
}

fn decompose(p: &BihomogeneousPolynomial, k: usize) -> Vec<BihomogeneousPolynomial> {
    let m = p.vars();
    if k == 0 {
        return vec![p.clone()];
    }
    let lower = decompose(&p.complex_laplacian(), k - 1);
    let r2 = BihomogeneousPolynomial::r_squared(m);
    let mut comps = Vec::with_capacity(k + 1);
    let mut rest = p.clone();
    for (l, b) in lower.into_iter().enumerate() {
        let j = (k - l) as i64;
        let c = j * (m as i64 + 2 * l as i64 + j - 1);
        let h = b.scale(&real(Rational::one() / int(c)));
        rest = rest - r2.pow(j as u32) * h.clone();
        comps.push(h);
    }
    comps.push(rest);
    comps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{einstein_tau, transition_map};
    use crate::polynomial::rat;
    use crate::sampling;

    type P = BihomogeneousPolynomial;

    #[test]
    fn basis_sizes_and_trace() {
        assert_eq!(basis_first_eigenspace(2).unwrap().len(), 8);
        assert_eq!(basis_first_eigenspace(3).unwrap().len(), 15);
        for a in basis_first_eigenspace(3).unwrap() {
            assert!(a.is_trace_free());
        }
    }

    #[test]
    fn special_form() {
        let a = special_phi(2).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let e = if j == k { 0 } else { 1 };
                assert_eq!(*a.entry(j, k), real(int(e)));
            }
        }
        let b = special_phi(3).unwrap();
        assert!(b.entry(3, 0).is_zero() && b.entry(0, 1).is_one());
        assert_eq!(special_phi(1), Err(Error::RequiresTwo(1)));
    }

    #[test]
    fn point_values() {
        let o = ChartPoint::<f64>::origin(2, 0).unwrap();
        assert_eq!(phi_value_at(&special_phi(2).unwrap(), &o), 0.0);
        let d = HermitianForm::diagonal(&[int(1), int(-1), int(0)]).unwrap();
        assert_eq!(phi_value_at(&d, &o), 1.0);
    }

    #[test]
    fn chart_independence() {
        let a = special_phi(2).unwrap().add(&HermitianForm::antisymmetric_unit(2, 0, 2));
        for p in sampling::chart_points(2, 20, 3, 2.0) {
            let v0 = phi_value_at(&a, &p);
            for t in 1..=2 {
                let q = transition_map(&p, t).unwrap();
                assert!((phi_value_at(&a, &q) - v0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_residuals() {
        let tau = einstein_tau::<f64>(2).unwrap();
        let pts = sampling::chart_points(2, 20, 5, 2.0);
        assert!(verify_eigen(&special_phi(2).unwrap(), tau, &pts) < 1e-8);
        assert_eq!(verify_eigen(&HermitianForm::zero(2), tau, &pts), 0.0);
        let traced = HermitianForm::diagonal(&[int(1), int(0), int(0)]).unwrap();
        assert!(verify_eigen(&traced, tau, &pts) > 1.0);
    }

    #[test]
    fn gram_rank_full() {
        for n in 1..=3 {
            assert_eq!(gram_rank(&basis_first_eigenspace(n).unwrap()).unwrap(), n * (n + 2));
        }
    }

    #[test]
    fn decomposition_degree_one() {
        let d = harmonic_decomposition(&P::abs_sq(3, 0), 1).unwrap();
        let expect_h = P::abs_sq(3, 0) - P::r_squared(3).scale(&real(rat(1, 3)));
        assert_eq!(*d.harmonic(), expect_h);
        assert_eq!(d.quotient(), P::constant(3, real(rat(1, 3))));
        assert!(d.harmonic().flat_laplacian().is_zero());

        let off = P::z(3, 0) * P::zbar(3, 1);
        let d = harmonic_decomposition(&off, 1).unwrap();
        assert_eq!(*d.harmonic(), off);
        assert!(d.quotient().is_zero());
    }

    #[test]
    fn decomposition_of_special_cube() {
        let f = special_phi(2).unwrap().to_polynomial();
        let d = harmonic_decomposition(&f.pow(3), 3).unwrap();
        assert_eq!(d.recompose(), f.pow(3));
        for (l, h) in d.components.iter().enumerate() {
            assert!(h.flat_laplacian().is_zero());
            assert!(h.is_bihomogeneous(l as u32));
        }
        assert_eq!(d.constant_term(), real(rat(1, 5)));
    }

    #[test]
    fn decomposition_errors() {
        let f = P::abs_sq(2, 0);
        assert_eq!(
            harmonic_decomposition(&f.pow(4), 4),
            Err(Error::UnsupportedDegree { k: 4, max: 3 })
        );
        assert_eq!(harmonic_decomposition(&f, 2), Err(Error::NotBihomogeneous { k: 2 }));
    }
}
