//! Reference computations that share no code with the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

/// Student t cdf by composite Simpson quadrature of the density.
pub fn t_cdf_simpson(x: f64, df: f64) -> f64 {
    if df.is_infinite() {
        return normal_cdf_simpson(x);
    }
    let c = (ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df)).exp() / (df * std::f64::consts::PI).sqrt();
    let dens = |t: f64| c * (1.0 + t * t / df).powf(-0.5 * (df + 1.0));
    0.5 + simpson(dens, 0.0, x, 20_000)
}

pub fn normal_cdf_simpson(x: f64) -> f64 {
    let dens = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    0.5 + simpson(dens, 0.0, x, 20_000)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Upper-tail p-value of a t statistic, by alternative name.
pub fn t_p_value(t: f64, df: f64, alternative: &str) -> f64 {
    match alternative {
        "greater" => 1.0 - t_cdf_simpson(t, df),
        "less" => t_cdf_simpson(t, df),
        _ => 2.0 * (1.0 - t_cdf_simpson(t.abs(), df)),
    }
}

/// Plain Cholesky factor (lower, row-major) of a positive definite matrix.
pub fn cholesky(a: &[f64], q: usize) -> Vec<f64> {
    let mut l = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..=i {
            let s: f64 = (0..j).map(|m| l[i * q + m] * l[j * q + m]).sum();
            if i == j {
                l[i * q + i] = (a[i * q + i] - s).max(0.0).sqrt();
            } else {
                l[i * q + j] = (a[i * q + j] - s) / l[j * q + j];
            }
        }
    }
    l
}

/// Brute-force Monte Carlo estimate and binomial standard error of
/// `P(lower < T < upper)` for a central multivariate t (`df = inf`: normal).
pub fn mvt_monte_carlo(
    corr: &[f64],
    q: usize,
    df: f64,
    lower: &[f64],
    upper: &[f64],
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let l = cholesky(corr, q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chi = df.is_finite().then(|| ChiSquared::new(df).unwrap());
    let mut z = vec![0.0; q];
    let mut hits = 0usize;
    for _ in 0..draws {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let scale = chi.map_or(1.0, |c| (c.sample(&mut rng) / df).sqrt());
        let inside = (0..q).all(|i| {
            let x: f64 = (0..=i).map(|m| l[i * q + m] * z[m]).sum::<f64>() / scale;
            x > lower[i] && x < upper[i]
        });
        hits += usize::from(inside);
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

/// Draws of `max_i T_i` (or `max_i |T_i|`) for an equicoordinate oracle.
pub fn mvt_max_draws(corr: &[f64], q: usize, df: f64, abs: bool, draws: usize, seed: u64) -> Vec<f64> {
    let l = cholesky(corr, q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chi = df.is_finite().then(|| ChiSquared::new(df).unwrap());
    let mut z = vec![0.0; q];
    (0..draws)
        .map(|_| {
            for v in z.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let scale = chi.map_or(1.0, |c| (c.sample(&mut rng) / df).sqrt());
            (0..q)
                .map(|i| {
                    let x: f64 = (0..=i).map(|m| l[i * q + m] * z[m]).sum::<f64>() / scale;
                    if abs {
                        x.abs()
                    } else {
                        x
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Random correlation matrix from `q + 1` Gaussian factors.
pub fn random_correlation(q: usize, rng: &mut impl Rng) -> Vec<f64> {
    let k = q + 1;
    let a: Vec<f64> = (0..q * k).map(|_| StandardNormal.sample(rng)).collect();
    let mut s = vec![0.0; q * q];
    for i in 0..q {
        for j in 0..q {
            s[i * q + j] = (0..k).map(|m| a[i * k + m] * a[j * k + m]).sum();
        }
    }
    let d: Vec<f64> = (0..q).map(|i| s[i * q + i].sqrt()).collect();
    for i in 0..q {
        for j in 0..q {
            s[i * q + j] /= d[i] * d[j];
        }
        s[i * q + i] = 1.0;
    }
    s
}

/// Normal samples for each group, control first.
pub fn normal_groups(means: &[f64], sds: &[f64], ns: &[usize], rng: &mut impl Rng) -> Vec<(String, Vec<f64>)> {
    means
        .iter()
        .zip(sds)
        .zip(ns)
        .enumerate()
        .map(|(g, ((&m, &s), &n))| {
            let v = (0..n)
                .map(|_| { let z: f64 = StandardNormal.sample(rng); m + s * z })
                .collect::<Vec<f64>>();
            (format!("g{g}"), v)
        })
        .collect()
}

pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}
