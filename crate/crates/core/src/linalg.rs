//! Dense helpers for the small symmetric matrices that appear here (q <= 32).

use crate::Scalar;

/// Eigenvalues of a symmetric `n x n` row-major matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(a: &[T], n: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + m[i * n + j] * m[i * n + j];
            }
        }
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + m[i * n + i] * m[i * n + i];
        }
        if off <= eps * eps * (diag + T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// Inverse of a square row-major matrix by Gauss-Jordan elimination with partial
/// pivoting. `None` if a pivot vanishes.
pub fn invert<T: Scalar>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            m[r * n + col]
                .abs()
                .partial_cmp(&m[s * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot * n + col].abs() <= T::epsilon() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] = m[col * n + k] / d;
            inv[col * n + k] = inv[col * n + k] / d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == T::zero() {
                continue;
            }
            for k in 0..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
                inv[r * n + k] = inv[r * n + k] - f * inv[col * n + k];
            }
        }
    }
    Some(inv)
}
