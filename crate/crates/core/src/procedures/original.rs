use super::{check_groups, to_f64_summaries, Layout, TestReport, TestSpec};
use crate::contrasts::{correlation_pooled, dunnett_contrasts};
use crate::data::GroupSummary;
use crate::error::{Error, Result};
use crate::Scalar;

/// Dunnett's pooled-variance single-step test.
///
/// `t_i = (ybar_i - ybar_0) / sqrt(MQ_R (1/n_0 + 1/n_i))` with the residual mean
/// square `MQ_R` on `N - (k + 1)` df, jointly q-variate t with the pooled
/// contrast correlation.
pub fn dunnett_original<T: Scalar>(
    summaries: &[GroupSummary<T>],
    spec: &TestSpec,
) -> Result<TestReport<T>> {
    spec.validate()?;
    layout(&to_f64_summaries(summaries))?.into_report(spec)
}

pub(super) fn layout(s: &[GroupSummary<f64>]) -> Result<Layout> {
    check_groups(s)?;
    let k = s.len() - 1;
    let total: usize = s.iter().map(|g| g.n).sum();
    let df = (total - (k + 1)) as f64;
    if df < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "residual df {df} < 1 (N = {total}, {} groups)",
            k + 1
        )));
    }
    let mq = s.iter().map(|g| (g.n - 1) as f64 * g.var).sum::<f64>() / df;
    if !(mq > 0.0) {
        return Err(Error::DegenerateVariance(
            "pooled residual variance is zero (every group is constant)".into(),
        ));
    }
    let ns: Vec<usize> = s.iter().map(|g| g.n).collect();
    let corr = correlation_pooled(&dunnett_contrasts::<f64>(k)?, &ns)?;
    let n0 = s[0].n as f64;
    Ok(Layout {
        labels: labels(s),
        estimates: s[1..].iter().map(|g| g.mean - s[0].mean).collect(),
        stderrs: s[1..]
            .iter()
            .map(|g| (mq * (1.0 / n0 + 1.0 / g.n as f64)).sqrt())
            .collect(),
        dfs: vec![df; k],
        corr,
        joint: true,
        global_df: Some(df),
        pooled_var: Some(mq),
    })
}

pub(super) fn labels(s: &[GroupSummary<f64>]) -> Vec<String> {
    s[1..]
        .iter()
        .map(|g| format!("{} - {}", g.label, s[0].label))
        .collect()
}
