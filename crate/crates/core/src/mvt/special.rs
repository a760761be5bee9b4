//! Univariate normal, Student t and chi-square helpers.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Beyond this many degrees of freedom the t distribution is treated as normal.
const DF_NORMAL_LIMIT: f64 = 1e8;

#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal quantile; `p` is clamped to the open unit interval.
#[inline]
pub fn norm_quantile(p: f64) -> f64 {
    let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    -SQRT_2 * erfc_inv(2.0 * p)
}

fn check_df(df: f64) -> Result<()> {
    if df.is_nan() || df <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "degrees of freedom must be positive, got {df}"
        )));
    }
    Ok(())
}

/// Upper tail `P(T > x)` of Student's t with `df` degrees of freedom
/// (`df = inf` is the standard normal).
pub fn t_sf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if df > DF_NORMAL_LIMIT {
        return Ok(norm_cdf(-x));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let half_tail = 0.5 * beta_reg(0.5 * df, 0.5, df / (df + x * x));
    Ok(if x > 0.0 { half_tail } else { 1.0 - half_tail })
}

/// CDF of Student's t with `df` degrees of freedom (`df = inf` is the standard normal).
pub fn t_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if df > DF_NORMAL_LIMIT {
        return Ok(norm_cdf(x));
    }
    t_sf(-x, df)
}

/// Quantile of Student's t.
pub fn t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability must lie in [0, 1], got {p}"
        )));
    }
    if df > DF_NORMAL_LIMIT {
        return Ok(match p {
            0.0 => f64::NEG_INFINITY,
            1.0 => f64::INFINITY,
            _ => norm_quantile(p),
        });
    }
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    Ok(dist.inverse_cdf(p))
}

/// Quantile of the chi-square distribution with `df` degrees of freedom.
///
/// Wilson-Hilferty start followed by safeguarded Newton steps on the regularized
/// lower incomplete gamma function.
pub fn chi2_quantile(p: f64, df: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let a = 0.5 * df;
    let lg = ln_gamma(a);
    let cdf = |x: f64| gamma_lr(a, 0.5 * x);
    let pdf = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        ((a - 1.0) * (0.5 * x).ln() - 0.5 * x - lg).exp() * 0.5
    };

    let z = norm_quantile(p);
    let h = 2.0 / (9.0 * df);
    let wh = df * (1.0 - h + z * h.sqrt()).powi(3);
    // small-x series: P(x) ~ (x/2)^a / Gamma(a + 1)
    let small = 2.0 * ((p.ln() + ln_gamma(a + 1.0)) / a).exp();
    let mut x = if wh > 0.0 && wh > small { wh } else { small };

    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for _ in 0..60 {
        let f = cdf(x) - p;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let d = pdf(x);
        let mut next = if d > 0.0 { x - f / d } else { f64::NAN };
        if !next.is_finite() || next <= lo || next >= hi {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 1e-14 * x.max(1e-300) {
            return next;
        }
        x = next;
    }
    x
}
