//! Many-to-one (Dunnett-type) multiple comparisons to a control.
//!
//! Four single-step procedures share one max-T machinery:
//!
//! - [`Method::Original`]: pooled variance, common residual df, pooled correlation.
//! - [`Method::WelchPi`]: per-comparison Welch standard errors and
//!   Welch-Satterthwaite df, plug-in correlation.
//! - [`Method::Sandwich`]: heteroscedasticity-consistent (HC3) covariance of the
//!   group means with the common residual df.
//! - [`Method::BonferroniWelch`]: univariate Welch tests, Bonferroni-adjusted.
//!
//! The statistics layer is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`. Multivariate t probabilities live
//! in [`mvt`], and [`sim`] estimates error rates and power by simulation.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contrasts;
pub mod data;
pub mod error;
mod linalg;
pub mod mvt;
pub mod procedures;
mod scalar;
pub mod sim;

pub use contrasts::{
    contrast_correlation, correlation_plugin, correlation_pooled, dunnett_contrasts, validate,
    Validity,
};
pub use data::{csv_header, parse_dataset, summarize, Record, CREATINE_KINASE_CSV};
pub use error::{Error, Result};
pub use mvt::{
    equicoordinate_quantile, mvt_prob, t_cdf, MvtProblem, MvtResult, MvtSettings, Tail,
};
pub use procedures::{
    bonferroni_welch, dunnett_original, hc_covariance, run_test, sandwich_maxt, welch_df,
    welch_pi, Alternative, HcFlavor, Method, TestSpec,
};
pub use scalar::Scalar;
pub use sim::{reproduce_table, run_scenario, Scenario, SimReport, TableId};

pub type Dataset = data::Dataset<f64>;
pub type GroupSummary = data::GroupSummary<f64>;
pub type ContrastMatrix = contrasts::ContrastMatrix<f64>;
pub type CorrelationMatrix = contrasts::CorrelationMatrix<f64>;
pub type ComparisonResult = procedures::ComparisonResult<f64>;
pub type TestReport = procedures::TestReport<f64>;

pub type Dataset32 = data::Dataset<f32>;
pub type GroupSummary32 = data::GroupSummary<f32>;
pub type ContrastMatrix32 = contrasts::ContrastMatrix<f32>;
pub type CorrelationMatrix32 = contrasts::CorrelationMatrix<f32>;
pub type TestReport32 = procedures::TestReport<f32>;
