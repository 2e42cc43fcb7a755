//! Small dense linear algebra on row-major square matrices.

use num_rational::BigRational;
use num_traits::Zero;

use crate::scalar::Real;

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Returns `None` for a numerically singular matrix.
pub fn invert<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut inv = identity::<T>(n);
    let scale = a.iter().fold(T::zero(), |s, x| s.max(x.abs()));
    let tiny = scale * T::epsilon() * T::from_usize(n).unwrap();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap())
            .unwrap();
        if m[pivot * n + col].abs() <= tiny {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let p = T::one() / m[col * n + col];
        for k in 0..n {
            m[col * n + k] = m[col * n + k] * p;
            inv[col * n + k] = inv[col * n + k] * p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col];
            if f.is_zero() {
                continue;
            }
            for k in 0..n {
                m[row * n + k] = m[row * n + k] - f * m[col * n + k];
                inv[row * n + k] = inv[row * n + k] - f * inv[col * n + k];
            }
        }
    }
    Some(inv)
}

pub fn identity<T: Real>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}

pub fn matmul<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] = c[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    c
}

/// Cholesky factor `L` with `a = L Lᵀ`; `None` unless `a` is symmetric positive definite.
pub fn cholesky<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// `sqrt(det a)` for symmetric positive definite `a`.
pub fn sqrt_det_spd<T: Real>(a: &[T], n: usize) -> Option<T> {
    let l = cholesky(a, n)?;
    Some((0..n).fold(T::one(), |p, i| p * l[i * n + i]))
}

/// Exact rank of a rational matrix with `rows × cols` entries, row-major.
pub fn rational_rank(a: &[BigRational], rows: usize, cols: usize) -> usize {
    let mut m = a.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
            continue;
        };
        for k in 0..cols {
            m.swap(pivot * cols + k, rank * cols + k);
        }
        let p = m[rank * cols + col].clone();
        for row in 0..rows {
            if row == rank || m[row * cols + col].is_zero() {
                continue;
            }
            let f = &m[row * cols + col] / &p;
            for k in col..cols {
                let delta = &f * &m[rank * cols + k];
                m[row * cols + k] -= delta;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Smallest pivot magnitude of an LDLᵀ-style elimination on a symmetric
/// matrix; positive and bounded away from zero iff the matrix is well
/// conditioned positive definite.
pub fn min_cholesky_pivot<T: Real>(a: &[T], n: usize) -> Option<T> {
    let l = cholesky(a, n)?;
    Some((0..n).fold(T::infinity(), |m, i| m.min(l[i * n + i] * l[i * n + i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn inverse_roundtrip() {
        let a: [f64; 9] = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = invert(&a, 3).unwrap();
        let p = matmul(&a, &inv, 3);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[i * 3 + j] - e).abs() < 1e-14);
            }
        }
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }

    #[test]
    fn sqrt_det_of_diagonal() {
        let a: [f64; 4] = [4.0, 0.0, 0.0, 9.0];
        assert!((sqrt_det_spd(&a, 2).unwrap() - 6.0).abs() < 1e-14);
        assert!(sqrt_det_spd(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }

    #[test]
    fn exact_rank() {
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        let a = vec![r(1), r(2), r(3), r(2), r(4), r(6), r(0), r(1), r(1)];
        assert_eq!(rational_rank(&a, 3, 3), 2);
    }
}
