use super::original::labels;
use super::{check_groups, to_f64_summaries, Layout, TestReport, TestSpec};
use crate::contrasts::{correlation_plugin, dunnett_contrasts, CorrelationMatrix};
use crate::data::GroupSummary;
use crate::error::{Error, Result};
use crate::Scalar;

/// Welch-Satterthwaite degrees of freedom of `ybar_i - ybar_0`.
pub fn welch_df<T: Scalar>(s0_sq: T, n0: usize, si_sq: T, ni: usize) -> Result<T> {
    if n0 < 2 || ni < 2 {
        return Err(Error::InvalidArgument(format!(
            "Welch df needs n >= 2 in both groups (got {n0} and {ni})"
        )));
    }
    if s0_sq < T::zero() || si_sq < T::zero() {
        return Err(Error::InvalidArgument("variances must be non-negative".into()));
    }
    let a = s0_sq / T::from_count(n0);
    let b = si_sq / T::from_count(ni);
    if !(a + b > T::zero()) {
        return Err(Error::DegenerateVariance(
            "both variances of the Welch pair are zero".into(),
        ));
    }
    let den = a * a / T::from_count(n0 - 1) + b * b / T::from_count(ni - 1);
    Ok((a + b) * (a + b) / den)
}

/// Welch-type plug-in max-T test.
///
/// Each comparison uses its own Welch standard error and df; comparison `i`'s
/// p-value and critical value come from the q-variate t with df `df_{0,i}` and
/// the plug-in correlation.
pub fn welch_pi<T: Scalar>(summaries: &[GroupSummary<T>], spec: &TestSpec) -> Result<TestReport<T>> {
    spec.validate()?;
    layout(&to_f64_summaries(summaries), true)?.into_report(spec)
}

/// Univariate Welch t-tests with Bonferroni adjustment `min(1, k p_i)`; bounds
/// at level `1 - alpha/k` with the Welch df.
pub fn bonferroni_welch<T: Scalar>(
    summaries: &[GroupSummary<T>],
    spec: &TestSpec,
) -> Result<TestReport<T>> {
    spec.validate()?;
    layout(&to_f64_summaries(summaries), false)?.into_report(spec)
}

pub(super) fn layout(s: &[GroupSummary<f64>], joint: bool) -> Result<Layout> {
    check_groups(s)?;
    let k = s.len() - 1;
    let c = &s[0];
    let mut stderrs = Vec::with_capacity(k);
    let mut dfs = Vec::with_capacity(k);
    for g in &s[1..] {
        let df = welch_df(c.var, c.n, g.var, g.n).map_err(|e| match e {
            Error::DegenerateVariance(_) => Error::DegenerateVariance(format!(
                "groups `{}` and `{}` both have zero variance",
                c.label, g.label
            )),
            e => e,
        })?;
        dfs.push(df);
        stderrs.push((c.var / c.n as f64 + g.var / g.n as f64).sqrt());
    }
    let corr = if joint {
        correlation_plugin(&dunnett_contrasts::<f64>(k)?, s)?
    } else {
        CorrelationMatrix::identity(k)
    };
    Ok(Layout {
        labels: labels(s),
        estimates: s[1..].iter().map(|g| g.mean - c.mean).collect(),
        stderrs,
        dfs,
        corr,
        joint,
        global_df: None,
        pooled_var: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((welch_df(1.0f64, 6, 1.0, 6).unwrap() - 10.0).abs() < 1e-12);
        assert!((welch_df(0.0f64, 6, 1.0, 6).unwrap() - 5.0).abs() < 1e-12);
        // (1/9 + 16/5)^2 / ((1/9)^2/8 + (16/5)^2/4) = 10.9629/2.5615
        let a = 1.0 / 9.0;
        let b = 16.0 / 5.0;
        let hand = (a + b) * (a + b) / (a * a / 8.0 + b * b / 4.0);
        let df = welch_df(1.0f64, 9, 16.0, 5).unwrap();
        assert!((df - hand).abs() < 1e-12);
        assert!((df - 4.280_020).abs() < 1e-5);
        assert!(matches!(
            welch_df(0.0f64, 4, 0.0, 4),
            Err(Error::DegenerateVariance(_))
        ));
        assert!(welch_df(1.0f64, 1, 1.0, 4).is_err());
    }
}
