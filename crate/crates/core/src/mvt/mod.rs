//! Central multivariate t (and normal) rectangle probabilities and
//! equicoordinate quantiles.
//!
//! Probabilities are computed by the separation-of-variables transform with
//! variable prioritization, integrated over the unit cube by a randomized
//! Kronecker lattice (square roots of primes as generators) with the tent
//! periodization and antithetic pairs. Independent random shifts give
//! replicate estimates whose spread is the reported standard error. The t
//! case integrates the chi radial variable as one extra cube coordinate.
//!
//! Everything here works in `f64`.

mod radial;
mod sov;
pub mod special;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contrasts::CorrelationMatrix;
use crate::error::{Error, Result};
use sov::Sov;
pub use special::{norm_cdf, norm_quantile, t_cdf, t_quantile, t_sf};

/// Largest supported number of variables.
pub const MAX_DIM: usize = 32;

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];
const REPLICATES: usize = 12;
const INITIAL_POINTS: usize = 256;
/// Decisions far from the threshold settle on very few points.
const THRESHOLD_INITIAL_POINTS: usize = 32;
/// Work per round above which replicates are evaluated in parallel.
const PARALLEL_WORK: usize = 1 << 16;

/// Accuracy and randomization controls for the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MvtSettings {
    /// Target absolute error; integration stops once three standard errors fall below it.
    pub abs_tol: f64,
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for MvtSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-4,
            max_evaluations: 10_000_000,
            seed: 0,
        }
    }
}

impl MvtSettings {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }
}

/// `P(lower < T < upper)` for `T` central multivariate t with `df` degrees of
/// freedom (`f64::INFINITY` for the multivariate normal) and correlation `corr`.
#[derive(Debug, Clone)]
pub struct MvtProblem {
    pub corr: CorrelationMatrix<f64>,
    pub df: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub settings: MvtSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MvtResult {
    pub prob: f64,
    /// Standard error of `prob` estimated from the randomization replicates.
    pub err_est: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out before the tolerance was met;
    /// `prob` is then the best available estimate.
    pub converged: bool,
}

/// One- or two-sided equicoordinate event: `max T_i <= c` or `max |T_i| <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tail {
    OneSided,
    TwoSided,
}

impl MvtProblem {
    fn validate(&self) -> Result<()> {
        let q = self.corr.dim();
        if self.lower.len() != q || self.upper.len() != q {
            return Err(Error::InvalidArgument(format!(
                "limits of length {}/{} for a {q}-variate problem",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if q > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dimension {q} exceeds the supported maximum {MAX_DIM}"
            )));
        }
        if let Some(i) = (0..q).find(|&i| !(self.lower[i] < self.upper[i])) {
            return Err(Error::InvalidArgument(format!(
                "lower limit {} not below upper limit {} for variable {i}",
                self.lower[i], self.upper[i]
            )));
        }
        if self.df.is_nan() || self.df <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "degrees of freedom must be positive, got {}",
                self.df
            )));
        }
        if !(self.settings.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("abs_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Rectangle probability of the central multivariate t (or normal) distribution.
pub fn mvt_prob(p: &MvtProblem) -> Result<MvtResult> {
    prob_with(p, Stop::Tolerance)
}

/// How long to integrate.
#[derive(Debug, Clone, Copy)]
enum Stop {
    /// Until three standard errors fall below `abs_tol`.
    Tolerance,
    /// A single round of this many lattice points per replicate, which makes
    /// the estimate a smooth function of the limits.
    Fixed(usize),
    /// As `Tolerance`, or earlier once the estimate is three standard errors
    /// away from the threshold.
    Threshold(f64),
}

fn prob_with(p: &MvtProblem, stop: Stop) -> Result<MvtResult> {
    p.validate()?;
    let keep: Vec<usize> = (0..p.corr.dim())
        .filter(|&i| p.lower[i].is_finite() || p.upper[i].is_finite())
        .collect();
    let q = keep.len();
    let exact = |prob: f64| MvtResult {
        prob: prob.clamp(0.0, 1.0),
        err_est: 0.0,
        evaluations: 0,
        converged: true,
    };
    match q {
        0 => return Ok(exact(1.0)),
        1 => {
            let i = keep[0];
            let df = p.df;
            // subtract the smaller tail for accuracy
            let prob = if p.upper[i] <= 0.0 || p.lower[i] < -p.upper[i] {
                t_cdf(p.upper[i], df)? - t_cdf(p.lower[i], df)?
            } else {
                t_sf(p.lower[i], df)? - t_sf(p.upper[i], df)?
            };
            return Ok(exact(prob));
        }
        _ => {}
    }
    let mut corr = Vec::with_capacity(q * q);
    for &i in &keep {
        for &j in &keep {
            corr.push(p.corr.get(i, j));
        }
    }
    let lower: Vec<f64> = keep.iter().map(|&i| p.lower[i]).collect();
    let upper: Vec<f64> = keep.iter().map(|&i| p.upper[i]).collect();
    let sov = Sov::new(&corr, q, &lower, &upper, p.df)?;
    Ok(integrate(&sov, &p.settings, stop))
}

fn integrate(sov: &Sov, settings: &MvtSettings, stop: Stop) -> MvtResult {
    let dims = sov.dims();
    let q = dims + 1;
    let gens: Vec<f64> = PRIMES[..dims]
        .iter()
        .map(|&p| f64::from(p).sqrt().fract())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut est = 0.0;
    let mut var = f64::INFINITY;
    let mut evaluations = 0usize;
    let mut points = match stop {
        Stop::Fixed(n) => n,
        Stop::Threshold(_) => THRESHOLD_INITIAL_POINTS,
        Stop::Tolerance => INITIAL_POINTS,
    };

    loop {
        let shifts: Vec<Vec<f64>> = (0..REPLICATES)
            .map(|_| (0..dims).map(|_| rng.random::<f64>()).collect())
            .collect();
        let replicate = |shift: &Vec<f64>| -> f64 {
            let mut x = vec![0.0; dims];
            let mut xa = vec![0.0; dims];
            let mut y = vec![0.0; q];
            let mut sum = 0.0;
            for i in 1..=points {
                let fi = i as f64;
                for d in 0..dims {
                    let u = (fi * gens[d] + shift[d]).fract();
                    let t = (2.0 * u - 1.0).abs();
                    x[d] = t;
                    xa[d] = 1.0 - t;
                }
                sum += sov.eval(&x, &mut y) + sov.eval(&xa, &mut y);
            }
            sum / (2 * points) as f64
        };
        let values: Vec<f64> = if points * q * REPLICATES >= PARALLEL_WORK {
            shifts.par_iter().map(replicate).collect()
        } else {
            shifts.iter().map(replicate).collect()
        };
        evaluations += 2 * points * REPLICATES;

        let m = REPLICATES as f64;
        let mean = values.iter().sum::<f64>() / m;
        let round_var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m * (m - 1.0));

        // inverse-variance combination of successive rounds
        if var.is_infinite() || round_var == 0.0 {
            est = mean;
            var = round_var;
        } else if var > 0.0 {
            let w = var / (var + round_var);
            est = w * mean + (1.0 - w) * est;
            var = var * round_var / (var + round_var);
        }

        let se = var.sqrt();
        match stop {
            Stop::Fixed(_) => return finish(est, se, evaluations, 3.0 * se <= settings.abs_tol),
            Stop::Threshold(t) if (est - t).abs() > 3.0 * se => {
                return finish(est, se, evaluations, true)
            }
            _ => {}
        }
        if 3.0 * se <= settings.abs_tol {
            return finish(est, se, evaluations, true);
        }
        let remaining = settings.max_evaluations.saturating_sub(evaluations);
        let next = (points * 3 / 2).min(remaining / (2 * REPLICATES));
        if next < points.min(INITIAL_POINTS) / 2 {
            return finish(est, se, evaluations, false);
        }
        points = next;
    }
}

fn finish(est: f64, se: f64, evaluations: usize, converged: bool) -> MvtResult {
    MvtResult {
        prob: est.clamp(0.0, 1.0),
        err_est: se,
        evaluations,
        converged,
    }
}

/// Probability of the equicoordinate event at `c` (`P(max T <= c)` or
/// `P(max |T| <= c)`).
pub fn equicoordinate_prob(
    corr: &CorrelationMatrix<f64>,
    df: f64,
    c: f64,
    tail: Tail,
    settings: &MvtSettings,
) -> Result<MvtResult> {
    equicoordinate_with(corr, df, c, tail, settings, Stop::Tolerance)
}

/// Whether the equicoordinate probability at `c` is at least `level`.
///
/// Integration stops as soon as the estimate is three standard errors away
/// from `level`, or once the usual tolerance is met.
pub fn equicoordinate_at_least(
    corr: &CorrelationMatrix<f64>,
    df: f64,
    c: f64,
    tail: Tail,
    level: f64,
    settings: &MvtSettings,
) -> Result<bool> {
    let r = equicoordinate_with(corr, df, c, tail, settings, Stop::Threshold(level))?;
    Ok(r.prob >= level)
}

fn equicoordinate_with(
    corr: &CorrelationMatrix<f64>,
    df: f64,
    c: f64,
    tail: Tail,
    settings: &MvtSettings,
    stop: Stop,
) -> Result<MvtResult> {
    let q = corr.dim();
    let lower = match tail {
        Tail::OneSided => f64::NEG_INFINITY,
        Tail::TwoSided => {
            if c <= 0.0 {
                return Ok(MvtResult {
                    prob: 0.0,
                    err_est: 0.0,
                    evaluations: 0,
                    converged: true,
                });
            }
            -c
        }
    };
    prob_with(
        &MvtProblem {
            corr: corr.clone(),
            df,
            lower: vec![lower; q],
            upper: vec![c; q],
            settings: *settings,
        },
        stop,
    )
}

const QUANTILE_BRACKET: f64 = 15.0;
const QUANTILE_TOL: f64 = 1e-6;

/// Critical value `c` with `P(max T <= c) = level` (one-sided) or
/// `P(max |T| <= c) = level` (two-sided).
///
/// The root is searched inside `[0, 15]` (`[-15, 15]` one-sided) and reported
/// to `1e-6`. The marginal quantile and the Bonferroni quantile bound it from
/// below and above, so the search starts from that interval. The lattice size
/// is chosen once, adaptively, near the Bonferroni bound; every later
/// evaluation reuses that size and the same seed so the estimated probability
/// is smooth in `c`, and an Illinois (modified regula falsi) iteration is used.
pub fn equicoordinate_quantile(
    corr: &CorrelationMatrix<f64>,
    df: f64,
    level: f64,
    tail: Tail,
    settings: &MvtSettings,
) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    let q = corr.dim() as f64;
    let (outer_lo, outer_hi) = match tail {
        Tail::OneSided => (-QUANTILE_BRACKET, QUANTILE_BRACKET),
        Tail::TwoSided => (0.0, QUANTILE_BRACKET),
    };
    let not_bracketed = || Error::RootNotBracketed {
        lo: outer_lo,
        hi: outer_hi,
        level,
    };
    let (marginal, bonferroni) = match tail {
        Tail::OneSided => (
            t_quantile(level, df)?,
            t_quantile(1.0 - (1.0 - level) / q, df)?,
        ),
        Tail::TwoSided => (
            t_quantile(0.5 * (1.0 + level), df)?,
            t_quantile(1.0 - 0.5 * (1.0 - level) / q, df)?,
        ),
    };
    if marginal > outer_hi || bonferroni < outer_lo {
        return Err(not_bracketed());
    }

    let guess = bonferroni.clamp(outer_lo, outer_hi);
    let pilot = equicoordinate_with(corr, df, guess, tail, settings, Stop::Tolerance)?;
    if pilot.evaluations == 0 {
        // exact probabilities (q = 1): the marginal quantile is the answer
        return Ok(marginal);
    }
    let fixed = Stop::Fixed((pilot.evaluations / (2 * REPLICATES)).max(INITIAL_POINTS));
    let g = |c: f64| -> Result<f64> {
        Ok(equicoordinate_with(corr, df, c, tail, settings, fixed)?.prob - level)
    };

    // widen the analytic bracket if integration noise puts the root outside it
    let mut lo = marginal.max(outer_lo);
    let mut g_lo = g(lo)?;
    while g_lo > 0.0 {
        if lo == outer_lo {
            return Err(not_bracketed());
        }
        lo = (lo - 0.25).max(outer_lo);
        g_lo = g(lo)?;
    }
    let mut hi = guess;
    let mut g_hi = g(hi)?;
    while g_hi < 0.0 {
        if hi == outer_hi {
            return Err(not_bracketed());
        }
        hi = (hi + 0.25).min(outer_hi);
        g_hi = g(hi)?;
    }

    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= QUANTILE_TOL {
            break;
        }
        let mut c = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(c > lo && c < hi) {
            c = 0.5 * (lo + hi);
        }
        let gc = g(c)?;
        if gc == 0.0 {
            return Ok(c);
        }
        if gc < 0.0 {
            lo = c;
            g_lo = gc;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = c;
            g_hi = gc;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
        if gc.abs() < 1e-13 {
            return Ok(c);
        }
    }
    Ok(0.5 * (lo + hi))
}
