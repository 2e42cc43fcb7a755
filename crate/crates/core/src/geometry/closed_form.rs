//! Closed-form Fubini–Study metric and its coordinate derivatives.
//!
//! In an affine chart with complex coordinates `w_a = x_a + i y_a` the
//! metric is `H_ab = δ_ab / S − w̄_a w_b / S²` with `S = 1 + |w|²`, the
//! complex Hessian of `log(1 + |w|²)`. Writing `w̄_a w_b = M_ab + i K_ab`
//! with `M_ab = x_a x_b + y_a y_b` and `K_ab = x_a y_b − y_a x_b`, the real
//! metric on interleaved coordinates `(x_1, y_1, x_2, y_2, …)` has 2×2 blocks
//!
//! ```text
//! [  P_ab  Q_ab ]      P = δ/S − M/S²
//! [ −Q_ab  P_ab ]      Q = −K/S²
//! ```
//!
//! `M` and `K` are quadratic forms, so all derivatives below are explicit
//! polynomials in the coordinates times powers of `1/S`.

use crate::scalar::{lit, Field, Real};

use super::MetricJet;

/// `P_ab` and `Q_ab` for one chart point, generic over any field so the same
/// formula can be evaluated on jets or plain numbers.
pub fn hermitian_blocks<T: Field>(coords: &[T]) -> (Vec<T>, Vec<T>) {
    let n = coords.len() / 2;
    let x = |a: usize| coords[2 * a].clone();
    let y = |a: usize| coords[2 * a + 1].clone();
    let mut s = T::one();
    for c in coords {
        s = s + c.clone() * c.clone();
    }
    let s_inv = T::one() / s;
    let s_inv2 = s_inv.clone() * s_inv.clone();
    let mut p = Vec::with_capacity(n * n);
    let mut q = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let m = x(a) * x(b) + y(a) * y(b);
            let k = x(a) * y(b) - y(a) * x(b);
            let delta = if a == b { s_inv.clone() } else { T::zero() };
            p.push(delta - m * s_inv2.clone());
            q.push(-(k * s_inv2.clone()));
        }
    }
    (p, q)
}

/// Real 2N×2N metric assembled from Hermitian blocks.
pub fn real_metric<T: Field>(coords: &[T]) -> Vec<T> {
    let n = coords.len() / 2;
    let d = 2 * n;
    let (p, q) = hermitian_blocks(coords);
    let mut g = vec![T::zero(); d * d];
    for a in 0..n {
        for b in 0..n {
            let pab = p[a * n + b].clone();
            let qab = q[a * n + b].clone();
            g[(2 * a) * d + 2 * b] = pab.clone();
            g[(2 * a + 1) * d + 2 * b + 1] = pab;
            g[(2 * a) * d + 2 * b + 1] = qab.clone();
            g[(2 * a + 1) * d + 2 * b] = -qab;
        }
    }
    g
}

/// Coordinate index of `x_a` (`im = false`) or `y_a` (`im = true`).
#[inline]
fn slot(a: usize, im: bool) -> usize {
    2 * a + usize::from(im)
}

/// Value, gradient and Hessian of a scalar, stored densely.
struct Parts<T> {
    v: T,
    d: Vec<T>,
    dd: Vec<T>,
}

/// Metric jet from the explicit derivative formulas. `second` controls
/// whether second derivatives are produced.
pub fn fs_metric_jet<T: Real>(coords: &[T], second: bool) -> MetricJet<T> {
    let n = coords.len() / 2;
    let d = 2 * n;
    let s = T::one() + coords.iter().fold(T::zero(), |acc, &c| acc + c * c);
    let s1 = T::one() / s;
    let s2 = s1 * s1;
    let s3 = s2 * s1;
    let s4 = s3 * s1;

    // 1/S and 1/S² with their derivatives.
    let mut inv1 = Parts {
        v: s1,
        d: vec![T::zero(); d],
        dd: vec![T::zero(); d * d],
    };
    let mut inv2 = Parts {
        v: s2,
        d: vec![T::zero(); d],
        dd: vec![T::zero(); d * d],
    };
    for g in 0..d {
        inv1.d[g] = lit::<T>(-2.0) * coords[g] * s2;
        inv2.d[g] = lit::<T>(-4.0) * coords[g] * s3;
        for h in 0..d {
            let kron = if g == h { T::one() } else { T::zero() };
            inv1.dd[g * d + h] = lit::<T>(-2.0) * kron * s2 + lit::<T>(8.0) * coords[g] * coords[h] * s3;
            inv2.dd[g * d + h] = lit::<T>(-4.0) * kron * s3 + lit::<T>(24.0) * coords[g] * coords[h] * s4;
        }
    }

    let mut g_out = vec![T::zero(); d * d];
    let mut dg = vec![T::zero(); d * d * d];
    let mut ddg = if second {
        vec![T::zero(); d * d * d * d]
    } else {
        Vec::new()
    };

    for a in 0..n {
        for b in 0..n {
            let (xa, ya, xb, yb) = (coords[2 * a], coords[2 * a + 1], coords[2 * b], coords[2 * b + 1]);
            // M = x_a x_b + y_a y_b, K = x_a y_b − y_a x_b as quadratic forms.
            let mut m = Parts {
                v: xa * xb + ya * yb,
                d: vec![T::zero(); d],
                dd: vec![T::zero(); d * d],
            };
            let mut k = Parts {
                v: xa * yb - ya * xb,
                d: vec![T::zero(); d],
                dd: vec![T::zero(); d * d],
            };
            let (ixa, iya, ixb, iyb) = (slot(a, false), slot(a, true), slot(b, false), slot(b, true));
            m.d[ixa] = m.d[ixa] + xb;
            m.d[ixb] = m.d[ixb] + xa;
            m.d[iya] = m.d[iya] + yb;
            m.d[iyb] = m.d[iyb] + ya;
            k.d[ixa] = k.d[ixa] + yb;
            k.d[iyb] = k.d[iyb] + xa;
            k.d[iya] = k.d[iya] - xb;
            k.d[ixb] = k.d[ixb] - ya;
            let one = T::one();
            let bump = |p: &mut Parts<T>, i: usize, j: usize, c: T| {
                p.dd[i * d + j] = p.dd[i * d + j] + c;
                p.dd[j * d + i] = p.dd[j * d + i] + c;
            };
            bump(&mut m, ixa, ixb, one);
            bump(&mut m, iya, iyb, one);
            bump(&mut k, ixa, iyb, one);
            bump(&mut k, iya, ixb, -one);

            let kron = a == b;
            // P = δ/S − M/S², Q = −K/S².
            let p_val = if kron { s1 } else { T::zero() } - m.v * s2;
            let q_val = -k.v * s2;
            let dp = |gi: usize| -> T {
                let mut v = -(m.d[gi] * s2 + m.v * inv2.d[gi]);
                if kron {
                    v = v + inv1.d[gi];
                }
                v
            };
            let dq = |gi: usize| -> T { -(k.d[gi] * s2 + k.v * inv2.d[gi]) };

            let r0 = 2 * a;
            let c0 = 2 * b;
            g_out[r0 * d + c0] = p_val;
            g_out[(r0 + 1) * d + c0 + 1] = p_val;
            g_out[r0 * d + c0 + 1] = q_val;
            g_out[(r0 + 1) * d + c0] = -q_val;
            for gi in 0..d {
                let (pv, qv) = (dp(gi), dq(gi));
                let base = gi * d * d;
                dg[base + r0 * d + c0] = pv;
                dg[base + (r0 + 1) * d + c0 + 1] = pv;
                dg[base + r0 * d + c0 + 1] = qv;
                dg[base + (r0 + 1) * d + c0] = -qv;
            }
            if second {
                for gi in 0..d {
                    for hi in 0..d {
                        let gh = gi * d + hi;
                        let mut pv = -(m.dd[gh] * s2 + m.d[gi] * inv2.d[hi] + m.d[hi] * inv2.d[gi] + m.v * inv2.dd[gh]);
                        if kron {
                            pv = pv + inv1.dd[gh];
                        }
                        let qv = -(k.dd[gh] * s2 + k.d[gi] * inv2.d[hi] + k.d[hi] * inv2.d[gi] + k.v * inv2.dd[gh]);
                        let base = (hi * d + gi) * d * d;
                        ddg[base + r0 * d + c0] = pv;
                        ddg[base + (r0 + 1) * d + c0 + 1] = pv;
                        ddg[base + r0 * d + c0 + 1] = qv;
                        ddg[base + (r0 + 1) * d + c0] = -qv;
                    }
                }
            }
        }
    }
    MetricJet {
        dim: d,
        g: g_out,
        dg,
        ddg: second.then_some(ddg),
    }
}

/// `sqrt(det g)` in closed form: `(1 + |w|²)^{-(N+1)}`.
pub fn fs_volume_density<T: Real>(coords: &[T]) -> T {
    let n = coords.len() / 2;
    let s = T::one() + coords.iter().fold(T::zero(), |acc, &c| acc + c * c);
    s.powi(-(n as i32 + 1))
}
