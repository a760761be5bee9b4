//! Many-to-one contrast matrices and the correlation matrices of the resulting
//! contrast statistics.

use serde::Serialize;

use crate::data::GroupSummary;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;
use crate::Scalar;

const ZERO_SUM_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// `q x (k + 1)` contrast coefficients, one row per comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastMatrix<T> {
    rows: Vec<Vec<T>>,
    labels: Vec<String>,
}

impl<T: Scalar> ContrastMatrix<T> {
    /// Wraps raw coefficient rows. No validity check is made here; see [`validate`].
    pub fn new(rows: Vec<Vec<T>>, labels: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidContrast("no rows".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidContrast("rows of unequal length".into()));
        }
        if labels.len() != rows.len() {
            return Err(Error::InvalidContrast(format!(
                "{} labels for {} rows",
                labels.len(),
                rows.len()
            )));
        }
        Ok(Self { rows, labels })
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of comparisons.
    pub fn q(&self) -> usize {
        self.rows.len()
    }

    /// Number of groups (columns).
    pub fn groups(&self) -> usize {
        self.rows[0].len()
    }

    /// Replaces the comparison labels with `"<treatment> - <control>"`.
    pub fn with_group_labels<S: AsRef<str>>(mut self, groups: &[S]) -> Self {
        for (row, label) in self.rows.iter().zip(self.labels.iter_mut()) {
            let pos = row.iter().position(|&c| c > T::zero());
            let neg = row.iter().position(|&c| c < T::zero());
            if let (Some(p), Some(n)) = (pos, neg) {
                *label = format!("{} - {}", groups[p].as_ref(), groups[n].as_ref());
            }
        }
        self
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Ok,
    Violation { row: usize, reason: String },
}

impl Validity {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validity::Ok)
    }
}

/// Dunnett contrasts for `k` treatments: row `i` is `-1` at the control, `+1` at
/// treatment `i`, and `0` elsewhere.
pub fn dunnett_contrasts<T: Scalar>(k: usize) -> Result<ContrastMatrix<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "Dunnett contrasts need at least one treatment".into(),
        ));
    }
    let rows = (1..=k)
        .map(|i| {
            let mut row = vec![T::zero(); k + 1];
            row[0] = -T::one();
            row[i] = T::one();
            row
        })
        .collect();
    let labels = (1..=k).map(|i| format!("{i} - 0")).collect();
    ContrastMatrix::new(rows, labels)
}

/// Checks that every row sums to zero and has exactly one positive and one
/// negative coefficient.
pub fn validate<T: Scalar>(cm: &ContrastMatrix<T>) -> Validity {
    for (i, row) in cm.rows().iter().enumerate() {
        let sum: T = row.iter().copied().sum();
        let scale = row.iter().fold(T::one(), |m, c| m.max(c.abs()));
        if sum.abs().to_f64_lossy() > ZERO_SUM_TOL * scale.to_f64_lossy() {
            return Validity::Violation {
                row: i,
                reason: format!("coefficients sum to {sum}, not 0"),
            };
        }
        let pos = row.iter().filter(|&&c| c > T::zero()).count();
        let neg = row.iter().filter(|&&c| c < T::zero()).count();
        if pos != 1 || neg != 1 {
            return Validity::Violation {
                row: i,
                reason: format!(
                    "{pos} positive and {neg} negative coefficients; exactly one of each is required"
                ),
            };
        }
    }
    Validity::Ok
}

/// Symmetric, unit-diagonal, positive semidefinite `q x q` matrix (row-major).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> CorrelationMatrix<T> {
    /// Checks the correlation invariants. The input is symmetrized first; a
    /// smallest eigenvalue below `-1e-10` is an error, never repaired.
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "correlation matrix of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        let mut m = data;
        let half = T::lit(0.5);
        for i in 0..dim {
            if (m[i * dim + i] - T::one()).abs().to_f64_lossy() > 1e-8 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {i} is {}, not 1",
                    m[i * dim + i]
                )));
            }
            m[i * dim + i] = T::one();
            for j in (i + 1)..dim {
                let a = m[i * dim + j];
                let b = m[j * dim + i];
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidArgument("non-finite correlation".into()));
                }
                if (a - b).abs().to_f64_lossy() > 1e-8 {
                    return Err(Error::InvalidArgument(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                let s = (a + b) * half;
                m[i * dim + j] = s;
                m[j * dim + i] = s;
            }
        }
        if dim > 1 {
            let min = symmetric_eigenvalues(&m, dim)
                .into_iter()
                .fold(T::infinity(), T::min)
                .to_f64_lossy();
            if min < -PSD_TOL {
                return Err(Error::NotPositiveSemidefinite(min));
            }
        }
        Ok(Self { dim, data: m })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = T::one();
        }
        Self { dim, data }
    }

    /// All off-diagonal entries equal to `rho`.
    pub fn equicorrelated(dim: usize, rho: T) -> Result<Self> {
        let data = (0..dim * dim)
            .map(|k| if k / dim == k % dim { T::one() } else { rho })
            .collect();
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_f64(&self) -> CorrelationMatrix<f64> {
        self.cast()
    }

    /// Converts to another scalar type without re-checking the invariants.
    pub fn cast<U: Scalar>(&self) -> CorrelationMatrix<U> {
        CorrelationMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| U::lit(v.to_f64_lossy())).collect(),
        }
    }

    /// Applies a permutation of the variables: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { dim: n, data }
    }
}

/// Correlation of the contrast estimates `c_i . ybar` when the group means are
/// independent with variances `weights[g]`:
/// `(sum_g c_ig c_jg w_g) / sqrt((sum_g c_ig^2 w_g)(sum_g c_jg^2 w_g))`.
pub fn contrast_correlation<T: Scalar>(
    cm: &ContrastMatrix<T>,
    weights: &[T],
) -> Result<CorrelationMatrix<T>> {
    if weights.len() != cm.groups() {
        return Err(Error::InvalidArgument(format!(
            "{} group weights for {} contrast columns",
            weights.len(),
            cm.groups()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
        return Err(Error::InvalidArgument(
            "group variance weights must be finite and non-negative".into(),
        ));
    }
    let q = cm.q();
    let cov = |a: &[T], b: &[T]| -> T {
        a.iter()
            .zip(b)
            .zip(weights)
            .map(|((&x, &y), &w)| x * y * w)
            .sum()
    };
    let var: Vec<T> = cm.rows().iter().map(|r| cov(r, r)).collect();
    if let Some(i) = var.iter().position(|v| *v <= T::zero()) {
        return Err(Error::DegenerateVariance(format!(
            "contrast `{}` has zero variance",
            cm.labels()[i]
        )));
    }
    let mut data = vec![T::zero(); q * q];
    for i in 0..q {
        data[i * q + i] = T::one();
        for j in (i + 1)..q {
            let r = cov(&cm.rows()[i], &cm.rows()[j]) / (var[i] * var[j]).sqrt();
            data[i * q + j] = r;
            data[j * q + i] = r;
        }
    }
    CorrelationMatrix::new(q, data)
}

/// Contrast correlation under a common error variance (weights `1/n_g`).
pub fn correlation_pooled<T: Scalar>(
    cm: &ContrastMatrix<T>,
    ns: &[usize],
) -> Result<CorrelationMatrix<T>> {
    if ns.contains(&0) {
        return Err(Error::InvalidArgument("group sizes must be >= 1".into()));
    }
    let w: Vec<T> = ns.iter().map(|&n| T::one() / T::from_count(n)).collect();
    contrast_correlation(cm, &w)
}

/// Plug-in contrast correlation from group variances (weights `s_g^2 / n_g`).
pub fn correlation_plugin<T: Scalar>(
    cm: &ContrastMatrix<T>,
    summaries: &[GroupSummary<T>],
) -> Result<CorrelationMatrix<T>> {
    let w: Vec<T> = summaries
        .iter()
        .map(|s| s.var / T::from_count(s.n))
        .collect();
    contrast_correlation(cm, &w)
}
