//! Single-step many-to-one procedures: adjusted p-values and compatible
//! simultaneous confidence bounds.
//!
//! Each method reduces the data to per-comparison estimates, standard errors,
//! degrees of freedom and a correlation matrix; the max-T step below is shared.

mod original;
mod sandwich;
mod welch;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::contrasts::CorrelationMatrix;
use crate::data::{Dataset, GroupSummary};
use crate::error::{Error, Result};
use crate::mvt::{
    self, equicoordinate_at_least, equicoordinate_prob, equicoordinate_quantile, MvtSettings, Tail,
};
use crate::Scalar;

pub use original::dunnett_original;
pub use sandwich::{hc_covariance, hc_covariance_general, sandwich_from_summaries, sandwich_maxt};
pub use welch::{bonferroni_welch, welch_df, welch_pi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    Less,
    Greater,
    TwoSided,
}

impl Alternative {
    fn tail(self) -> Tail {
        match self {
            Alternative::TwoSided => Tail::TwoSided,
            _ => Tail::OneSided,
        }
    }

    /// Maps a statistic onto the scale where large values count against H0.
    fn orient(self, t: f64) -> f64 {
        match self {
            Alternative::Greater => t,
            Alternative::Less => -t,
            Alternative::TwoSided => t.abs(),
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::Less => "less",
            Alternative::Greater => "greater",
            Alternative::TwoSided => "two-sided",
        })
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            "two-sided" | "two_sided" | "two.sided" | "twosided" => Ok(Alternative::TwoSided),
            _ => Err(Error::InvalidArgument(format!(
                "unknown alternative `{s}` (expected less, greater or two-sided)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Pooled-variance Dunnett test with the common residual df.
    Original,
    /// Welch-type plug-in: per-comparison Welch df and plug-in correlation.
    WelchPi,
    /// Heteroscedasticity-consistent covariance with the common residual df.
    Sandwich,
    /// Univariate Welch tests with Bonferroni adjustment.
    BonferroniWelch,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Original,
        Method::Sandwich,
        Method::WelchPi,
        Method::BonferroniWelch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Original => "original",
            Method::WelchPi => "welch_pi",
            Method::Sandwich => "sandwich",
            Method::BonferroniWelch => "bonferroni_welch",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "original" | "dunnett" => Ok(Method::Original),
            "welch_pi" | "welch" | "pi" => Ok(Method::WelchPi),
            "sandwich" | "hc" => Ok(Method::Sandwich),
            "bonferroni_welch" | "bonferroni" => Ok(Method::BonferroniWelch),
            _ => Err(Error::InvalidArgument(format!(
                "unknown method `{s}` (expected original, welch_pi, sandwich or bonferroni_welch)"
            ))),
        }
    }
}

/// Sandwich flavor. HC3 inflates squared residuals by `(1 - h)^-2`; HC0 uses
/// them as they are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HcFlavor {
    #[default]
    Hc3,
    Hc0,
}

impl FromStr for HcFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hc3" => Ok(HcFlavor::Hc3),
            "hc0" => Ok(HcFlavor::Hc0),
            _ => Err(Error::InvalidArgument(format!("unknown sandwich flavor `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestSpec {
    pub method: Method,
    pub alternative: Alternative,
    pub alpha: f64,
    pub hc: HcFlavor,
    pub mvt: MvtSettings,
}

impl Default for TestSpec {
    fn default() -> Self {
        Self {
            method: Method::Original,
            alternative: Alternative::TwoSided,
            alpha: 0.05,
            hc: HcFlavor::Hc3,
            mvt: MvtSettings::default(),
        }
    }
}

impl TestSpec {
    pub fn new(method: Method, alternative: Alternative) -> Self {
        Self {
            method,
            alternative,
            ..Self::default()
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self {
            mvt: self.mvt.with_seed(seed),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult<T> {
    pub label: String,
    /// Difference of the treatment mean to the control mean.
    pub estimate: T,
    pub stderr: T,
    pub df: T,
    pub statistic: T,
    pub p_adjusted: T,
    pub ci_low: T,
    pub ci_high: T,
    /// Critical value used for this comparison's confidence bound.
    pub critical: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport<T> {
    pub method: Method,
    pub alternative: Alternative,
    pub alpha: f64,
    pub comparisons: Vec<ComparisonResult<T>>,
    /// Common critical value; for per-comparison df methods the largest one.
    pub critical_value: T,
    /// Common df (original and sandwich).
    pub global_df: Option<T>,
    /// Pooled residual mean square (original only).
    pub pooled_var: Option<T>,
    /// Correlation of the test statistics used by the joint methods.
    pub correlation: Option<CorrelationMatrix<T>>,
    /// Largest integration standard error among the reported probabilities.
    pub max_integration_error: f64,
}

impl<T: Scalar> TestReport<T> {
    pub fn p_values(&self) -> Vec<T> {
        self.comparisons.iter().map(|c| c.p_adjusted).collect()
    }

    pub fn statistics(&self) -> Vec<T> {
        self.comparisons.iter().map(|c| c.statistic).collect()
    }
}

/// Runs `spec.method` on a dataset.
pub fn run_test<T: Scalar>(ds: &Dataset<T>, spec: &TestSpec) -> Result<TestReport<T>> {
    match spec.method {
        Method::Sandwich => sandwich_maxt(ds, spec),
        _ => run_on_summaries(&ds.summarize(), spec),
    }
}

/// Runs `spec.method` on group summaries. The sandwich method uses the
/// closed-form one-way covariance here.
pub fn run_on_summaries<T: Scalar>(
    summaries: &[GroupSummary<T>],
    spec: &TestSpec,
) -> Result<TestReport<T>> {
    match spec.method {
        Method::Original => dunnett_original(summaries, spec),
        Method::WelchPi => welch_pi(summaries, spec),
        Method::Sandwich => sandwich_from_summaries(summaries, spec),
        Method::BonferroniWelch => bonferroni_welch(summaries, spec),
    }
}

/// Per-comparison rejection decisions at `spec.alpha` (`p_adjusted <= alpha`).
///
/// Equivalent to thresholding [`run_on_summaries`] p-values, but integrates only
/// when the marginal and Bonferroni bounds `m <= p <= q m` do not already decide,
/// and then only until the estimate is clearly on one side of `alpha`.
pub fn rejections(summaries: &[GroupSummary<f64>], spec: &TestSpec) -> Result<Vec<bool>> {
    spec.validate()?;
    let layout = prepare(summaries, spec)?;
    let q = layout.q() as f64;
    (0..layout.q())
        .map(|i| {
            let x = spec.alternative.orient(layout.statistic(i));
            let marginal = layout.marginal_p(i, spec.alternative)?;
            if !layout.joint {
                return Ok((q * marginal).min(1.0) <= spec.alpha);
            }
            if marginal > spec.alpha {
                return Ok(false);
            }
            if q * marginal <= spec.alpha {
                return Ok(true);
            }
            equicoordinate_at_least(
                &layout.corr,
                layout.dfs[i],
                x,
                spec.alternative.tail(),
                1.0 - spec.alpha,
                &spec.mvt,
            )
        })
        .collect()
}

fn prepare(summaries: &[GroupSummary<f64>], spec: &TestSpec) -> Result<Layout> {
    match spec.method {
        Method::Original => original::layout(summaries),
        Method::WelchPi => welch::layout(summaries, true),
        Method::Sandwich => sandwich::layout(summaries, spec.hc),
        Method::BonferroniWelch => welch::layout(summaries, false),
    }
}

pub(crate) fn to_f64_summaries<T: Scalar>(s: &[GroupSummary<T>]) -> Vec<GroupSummary<f64>> {
    s.iter()
        .map(|g| GroupSummary {
            label: g.label.clone(),
            n: g.n,
            mean: g.mean.to_f64_lossy(),
            var: g.var.to_f64_lossy(),
        })
        .collect()
}

pub(crate) fn check_groups<T>(summaries: &[GroupSummary<T>]) -> Result<()> {
    if summaries.len() < 2 {
        return Err(Error::TooFewGroups(summaries.len()));
    }
    if let Some(g) = summaries.iter().find(|g| g.n < 2) {
        return Err(Error::GroupTooSmall {
            label: g.label.clone(),
            n: g.n,
        });
    }
    Ok(())
}

/// Comparison-level inputs of the max-T step, in `f64`.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub labels: Vec<String>,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub dfs: Vec<f64>,
    pub corr: CorrelationMatrix<f64>,
    /// Joint multivariate t adjustment; false means Bonferroni.
    pub joint: bool,
    pub global_df: Option<f64>,
    pub pooled_var: Option<f64>,
}

impl Layout {
    fn q(&self) -> usize {
        self.estimates.len()
    }

    fn statistic(&self, i: usize) -> f64 {
        self.estimates[i] / self.stderrs[i]
    }

    /// Unadjusted p-value of comparison `i` from its marginal t distribution.
    fn marginal_p(&self, i: usize, alt: Alternative) -> Result<f64> {
        let x = alt.orient(self.statistic(i));
        let sf = mvt::t_sf(x, self.dfs[i])?;
        Ok(match alt {
            Alternative::TwoSided => (2.0 * sf).min(1.0),
            _ => sf,
        })
    }

    fn critical(&self, i: usize, spec: &TestSpec) -> Result<f64> {
        let q = self.q() as f64;
        if self.joint {
            equicoordinate_quantile(
                &self.corr,
                self.dfs[i],
                1.0 - spec.alpha,
                spec.alternative.tail(),
                &spec.mvt,
            )
        } else {
            let level = match spec.alternative {
                Alternative::TwoSided => 1.0 - spec.alpha / (2.0 * q),
                _ => 1.0 - spec.alpha / q,
            };
            mvt::t_quantile(level, self.dfs[i])
        }
    }

    pub(crate) fn into_report<T: Scalar>(self, spec: &TestSpec) -> Result<TestReport<T>> {
        spec.validate()?;
        let q = self.q();
        let alt = spec.alternative;
        let mut crit_cache: HashMap<u64, f64> = HashMap::new();
        let mut max_err = 0.0f64;
        let mut comparisons = Vec::with_capacity(q);
        for i in 0..q {
            let t = self.statistic(i);
            let p = if self.joint {
                let r = equicoordinate_prob(
                    &self.corr,
                    self.dfs[i],
                    alt.orient(t),
                    alt.tail(),
                    &spec.mvt,
                )?;
                max_err = max_err.max(r.err_est);
                1.0 - r.prob
            } else {
                (q as f64 * self.marginal_p(i, alt)?).min(1.0)
            };
            let c = match crit_cache.get(&self.dfs[i].to_bits()) {
                Some(&c) => c,
                None => {
                    let c = self.critical(i, spec)?;
                    crit_cache.insert(self.dfs[i].to_bits(), c);
                    c
                }
            };
            let est = self.estimates[i];
            let half = c * self.stderrs[i];
            let (lo, hi) = match alt {
                Alternative::Greater => (est - half, f64::INFINITY),
                Alternative::Less => (f64::NEG_INFINITY, est + half),
                Alternative::TwoSided => (est - half, est + half),
            };
            comparisons.push(ComparisonResult {
                label: self.labels[i].clone(),
                estimate: T::lit(est),
                stderr: T::lit(self.stderrs[i]),
                df: T::lit(self.dfs[i]),
                statistic: T::lit(t),
                p_adjusted: T::lit(p.clamp(0.0, 1.0)),
                ci_low: T::lit(lo),
                ci_high: T::lit(hi),
                critical: T::lit(c),
            });
        }
        let critical_value = comparisons
            .iter()
            .map(|c| c.critical)
            .fold(T::neg_infinity(), T::max);
        let correlation = self.joint.then(|| self.corr.cast());
        Ok(TestReport {
            method: spec.method,
            alternative: alt,
            alpha: spec.alpha,
            comparisons,
            critical_value,
            global_df: self.global_df.map(T::lit),
            pooled_var: self.pooled_var.map(T::lit),
            correlation,
            max_integration_error: max_err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_enums() {
        assert_eq!("greater".parse::<Alternative>().unwrap(), Alternative::Greater);
        assert_eq!("two-sided".parse::<Alternative>().unwrap(), Alternative::TwoSided);
        assert!("sideways".parse::<Alternative>().is_err());
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("tukey".parse::<Method>().is_err());
        assert_eq!("HC0".parse::<HcFlavor>().unwrap(), HcFlavor::Hc0);
    }

    #[test]
    fn alpha_validated() {
        assert!(TestSpec::default().with_alpha(0.0).validate().is_err());
        assert!(TestSpec::default().with_alpha(1.0).validate().is_err());
        assert!(TestSpec::default().with_alpha(0.1).validate().is_ok());
    }
}
