//! Separation-of-variables transform of a rectangle probability to the unit cube.
//!
//! Variables are reordered so that the most constrained ones come first; the
//! Cholesky factor is built alongside the reordering. For a finite `df` the
//! radial chi variable occupies cube coordinate 0 and rescales the limits.

use std::sync::Arc;

use super::radial::RadialTable;
use super::special::{norm_cdf, norm_pdf, norm_quantile};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct Sov {
    q: usize,
    /// Lower-triangular Cholesky factor, row-major, of the reordered correlation.
    chol: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    df: f64,
    radial: Option<Arc<RadialTable>>,
    /// Original index of each reordered variable.
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) order: Vec<usize>,
}

impl Sov {
    pub(crate) fn new(corr: &[f64], q: usize, lower: &[f64], upper: &[f64], df: f64) -> Result<Self> {
        let mut c = corr.to_vec();
        let mut a = lower.to_vec();
        let mut b = upper.to_vec();
        let mut order: Vec<usize> = (0..q).collect();
        let mut l = vec![0.0; q * q];
        let mut y = vec![0.0; q];

        for i in 0..q {
            // choose the remaining variable with the smallest conditional interval probability
            let mut best = i;
            let mut best_p = f64::INFINITY;
            let mut best_limits = (0.0, 0.0);
            for j in i..q {
                let ss: f64 = (0..i).map(|m| l[j * q + m] * l[j * q + m]).sum();
                let v = c[j * q + j] - ss;
                if v <= PIVOT_TOL * PIVOT_TOL {
                    continue;
                }
                let sd = v.sqrt();
                let mu: f64 = (0..i).map(|m| l[j * q + m] * y[m]).sum();
                let lo = (a[j] - mu) / sd;
                let hi = (b[j] - mu) / sd;
                let p = norm_cdf(hi) - norm_cdf(lo);
                if p < best_p {
                    best_p = p;
                    best = j;
                    best_limits = (lo, hi);
                }
            }
            if best_p.is_infinite() {
                let ss: f64 = (0..i).map(|m| l[i * q + m] * l[i * q + m]).sum();
                return Err(Error::SingularCorrelation(c[i * q + i] - ss));
            }
            if best != i {
                swap_sym(&mut c, q, i, best);
                a.swap(i, best);
                b.swap(i, best);
                order.swap(i, best);
                for m in 0..i {
                    l.swap(i * q + m, best * q + m);
                }
            }
            let ss: f64 = (0..i).map(|m| l[i * q + m] * l[i * q + m]).sum();
            let d = (c[i * q + i] - ss).sqrt();
            l[i * q + i] = d;
            for r in (i + 1)..q {
                let s: f64 = (0..i).map(|m| l[r * q + m] * l[i * q + m]).sum();
                l[r * q + i] = (c[r * q + i] - s) / d;
            }
            // conditional mean of the truncated standard normal on the chosen interval
            let (lo, hi) = best_limits;
            y[i] = if best_p > 1e-12 {
                (norm_pdf(lo) - norm_pdf(hi)) / best_p
            } else if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo
            } else {
                hi
            };
        }
        Ok(Self {
            q,
            chol: l,
            lower: a,
            upper: b,
            df,
            radial: df.is_finite().then(|| RadialTable::get(df)),
            order,
        })
    }

    /// Dimension of the integration cube.
    pub(crate) fn dims(&self) -> usize {
        self.q - 1 + usize::from(self.df.is_finite())
    }

    /// Integrand at cube point `w`; `y` is scratch space of length `q`.
    #[inline]
    pub(crate) fn eval(&self, w: &[f64], y: &mut [f64]) -> f64 {
        let q = self.q;
        let (scale, w) = match &self.radial {
            Some(table) => (table.scale(w[0].clamp(1e-15, 1.0 - 1e-15)), &w[1..]),
            None => (1.0, w),
        };
        let mut f = 1.0;
        for i in 0..q {
            let row = &self.chol[i * q..i * q + i + 1];
            let shift: f64 = row[..i].iter().zip(&y[..i]).map(|(l, y)| l * y).sum();
            let d = row[i];
            let lo = (scaled(self.lower[i], scale) - shift) / d;
            let hi = (scaled(self.upper[i], scale) - shift) / d;
            let pa = norm_cdf(lo);
            let pb = norm_cdf(hi);
            let width = pb - pa;
            if width <= 0.0 {
                return 0.0;
            }
            f *= width;
            if i + 1 < q {
                y[i] = norm_quantile(pa + w[i] * width);
            }
        }
        f
    }
}

#[inline]
fn scaled(limit: f64, s: f64) -> f64 {
    if limit.is_infinite() {
        limit
    } else {
        limit * s
    }
}

fn swap_sym(c: &mut [f64], q: usize, i: usize, j: usize) {
    for k in 0..q {
        c.swap(i * q + k, j * q + k);
    }
    for k in 0..q {
        c.swap(k * q + i, k * q + j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reproduces_reordered_matrix() {
        let q = 3;
        let c = [1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0];
        let sov = Sov::new(&c, q, &[-1.0, -0.2, -3.0], &[2.0, 0.1, 0.5], f64::INFINITY).unwrap();
        for i in 0..q {
            for j in 0..q {
                let v: f64 = (0..q).map(|m| sov.chol[i * q + m] * sov.chol[j * q + m]).sum();
                let (oi, oj) = (sov.order[i], sov.order[j]);
                assert!((v - c[oi * q + oj]).abs() < 1e-14);
            }
        }
        // the narrowest interval, variable 1, goes first
        assert_eq!(sov.order[0], 1);
    }

    #[test]
    fn singular_matrix_rejected() {
        let c = [1.0, 1.0, 1.0, 1.0];
        let e = Sov::new(&c, 2, &[-1.0, -1.0], &[1.0, 1.0], 5.0).unwrap_err();
        assert!(matches!(e, Error::SingularCorrelation(_)));
    }
}
