use super::original::labels;
use super::{check_groups, to_f64_summaries, HcFlavor, Layout, TestReport, TestSpec};
use crate::contrasts::{contrast_correlation, dunnett_contrasts};
use crate::data::{Dataset, GroupSummary};
use crate::error::{Error, Result};
use crate::linalg::invert;
use crate::Scalar;

/// Heteroscedasticity-consistent covariance of the group means of a one-way
/// layout, `(k + 1) x (k + 1)`, control first.
///
/// With the cell-means design every leverage in group `g` is `1/n_g`, so the
/// sandwich is diagonal: HC3 gives `sum_j e_gj^2 / (n_g - 1)^2` and HC0 gives
/// `sum_j e_gj^2 / n_g^2`. [`hc_covariance_general`] evaluates the full matrix
/// formula instead.
pub fn hc_covariance<T: Scalar>(ds: &Dataset<T>, flavor: HcFlavor) -> Result<Vec<Vec<T>>> {
    let values = ds.group_values();
    let g = values.len();
    let mut cov = vec![vec![T::zero(); g]; g];
    for (i, v) in values.iter().enumerate() {
        let n = v.len();
        if n < 2 {
            return Err(Error::GroupTooSmall {
                label: ds.groups()[i].clone(),
                n,
            });
        }
        let nn = T::from_count(n);
        let mean = v.iter().copied().sum::<T>() / nn;
        let rss: T = v.iter().map(|&y| (y - mean) * (y - mean)).sum();
        cov[i][i] = rss / hc_divisor(n, flavor);
    }
    Ok(cov)
}

fn hc_divisor<T: Scalar>(n: usize, flavor: HcFlavor) -> T {
    match flavor {
        HcFlavor::Hc3 => T::from_count((n - 1) * (n - 1)),
        HcFlavor::Hc0 => T::from_count(n * n),
    }
}

/// `(X'X)^-1 X' diag(w_j e_j^2) X (X'X)^-1` with the dummy-coded cell-means
/// design `X`, OLS residuals `e` and `w_j = (1 - h_jj)^-2` (HC3) or `1` (HC0).
pub fn hc_covariance_general<T: Scalar>(ds: &Dataset<T>, flavor: HcFlavor) -> Result<Vec<Vec<T>>> {
    let p = ds.groups().len();
    let rows: Vec<(Vec<T>, T)> = ds
        .records()
        .iter()
        .map(|r| {
            let mut x = vec![T::zero(); p];
            let g = ds.groups().iter().position(|l| *l == r.group).unwrap_or(0);
            x[g] = T::one();
            (x, r.response)
        })
        .collect();

    let mut xtx = vec![T::zero(); p * p];
    let mut xty = vec![T::zero(); p];
    for (x, y) in &rows {
        for a in 0..p {
            xty[a] = xty[a] + x[a] * *y;
            for b in 0..p {
                xtx[a * p + b] = xtx[a * p + b] + x[a] * x[b];
            }
        }
    }
    let bread = invert(&xtx, p)
        .ok_or_else(|| Error::DegenerateVariance("design matrix is rank deficient".into()))?;
    let beta: Vec<T> = (0..p)
        .map(|a| (0..p).map(|b| bread[a * p + b] * xty[b]).sum())
        .collect();

    let mut meat = vec![T::zero(); p * p];
    for (x, y) in &rows {
        let fitted: T = (0..p).map(|a| x[a] * beta[a]).sum();
        let e = *y - fitted;
        let h: T = (0..p)
            .map(|a| (0..p).map(|b| x[a] * bread[a * p + b] * x[b]).sum::<T>())
            .sum();
        let w = match flavor {
            HcFlavor::Hc3 => {
                let one_minus = T::one() - h;
                if one_minus <= T::epsilon() {
                    return Err(Error::InvalidArgument(
                        "observation with leverage 1: HC3 is undefined for a group of size 1".into(),
                    ));
                }
                T::one() / (one_minus * one_minus)
            }
            HcFlavor::Hc0 => T::one(),
        };
        for a in 0..p {
            for b in 0..p {
                meat[a * p + b] = meat[a * p + b] + w * e * e * x[a] * x[b];
            }
        }
    }

    let mut tmp = vec![T::zero(); p * p];
    for a in 0..p {
        for b in 0..p {
            tmp[a * p + b] = (0..p).map(|c| bread[a * p + c] * meat[c * p + b]).sum();
        }
    }
    Ok((0..p)
        .map(|a| {
            (0..p)
                .map(|b| (0..p).map(|c| tmp[a * p + c] * bread[c * p + b]).sum())
                .collect()
        })
        .collect())
}

/// Max-T test with sandwich standard errors and the common residual df
/// `N - (k + 1)`; the statistic correlation comes from the sandwich covariance
/// of the contrasts.
pub fn sandwich_maxt<T: Scalar>(ds: &Dataset<T>, spec: &TestSpec) -> Result<TestReport<T>> {
    spec.validate()?;
    let cov = hc_covariance(ds, spec.hc)?;
    let summaries = to_f64_summaries(&ds.summarize());
    let diag: Vec<f64> = (0..cov.len()).map(|g| cov[g][g].to_f64_lossy()).collect();
    layout_from_diag(&summaries, diag)?.into_report(spec)
}

/// [`sandwich_maxt`] from group summaries, using `sum e^2 = (n - 1) s^2`.
pub fn sandwich_from_summaries<T: Scalar>(
    summaries: &[GroupSummary<T>],
    spec: &TestSpec,
) -> Result<TestReport<T>> {
    spec.validate()?;
    layout(&to_f64_summaries(summaries), spec.hc)?.into_report(spec)
}

pub(super) fn layout(s: &[GroupSummary<f64>], flavor: HcFlavor) -> Result<Layout> {
    check_groups(s)?;
    let diag = s
        .iter()
        .map(|g| (g.n - 1) as f64 * g.var / hc_divisor::<f64>(g.n, flavor))
        .collect();
    layout_from_diag(s, diag)
}

fn layout_from_diag(s: &[GroupSummary<f64>], diag: Vec<f64>) -> Result<Layout> {
    check_groups(s)?;
    let k = s.len() - 1;
    let total: usize = s.iter().map(|g| g.n).sum();
    let df = (total - (k + 1)) as f64;
    let mut stderrs = Vec::with_capacity(k);
    for (i, g) in s[1..].iter().enumerate() {
        let v = diag[0] + diag[i + 1];
        if !(v > 0.0) {
            return Err(Error::DegenerateVariance(format!(
                "groups `{}` and `{}` both have zero variance",
                s[0].label, g.label
            )));
        }
        stderrs.push(v.sqrt());
    }
    let corr = contrast_correlation(&dunnett_contrasts::<f64>(k)?, &diag)?;
    Ok(Layout {
        labels: labels(s),
        estimates: s[1..].iter().map(|g| g.mean - s[0].mean).collect(),
        stderrs,
        dfs: vec![df; k],
        corr,
        joint: true,
        global_df: Some(df),
        pooled_var: None,
    })
}
