mod common;

use common::{mvt_max_draws, mvt_monte_carlo, normal_cdf_simpson, random_correlation, t_cdf_simpson};
use mct_core::mvt::equicoordinate_prob;
use mct_core::{
    equicoordinate_quantile, mvt_prob, CorrelationMatrix, MvtProblem, MvtSettings, Tail,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

fn dunnett_balanced(q: usize) -> CorrelationMatrix {
    CorrelationMatrix::equicorrelated(q, 0.5).unwrap()
}

fn prob(corr: &CorrelationMatrix, df: f64, lower: &[f64], upper: &[f64]) -> (f64, f64) {
    let r = mvt_prob(&MvtProblem {
        corr: corr.clone(),
        df,
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        settings: MvtSettings::default(),
    })
    .unwrap();
    assert!(r.converged);
    (r.prob, r.err_est)
}

fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn balanced_two_sided_rectangle_against_brute_force() {
    let corr = dunnett_balanced(3);
    let (p, err) = prob(&corr, 20.0, &[-2.5; 3], &[2.5; 3]);
    let (mc, se) = mvt_monte_carlo(corr.as_slice(), 3, 20.0, &[-2.5; 3], &[2.5; 3], 1_000_000, 5);
    let combined = (err * err + se * se).sqrt();
    assert!((p - mc).abs() <= 3.0 * combined, "{p} vs {mc} (combined se {combined})");
}

#[test]
fn univariate_and_independent_quantiles() {
    let s = MvtSettings::default();
    let one = CorrelationMatrix::identity(1);
    let oracle = bisect(|x| t_cdf_simpson(x, 10.0), 0.95, 0.0, 10.0);
    assert!((oracle - 1.812461).abs() < 1e-6);
    let c = equicoordinate_quantile(&one, 10.0, 0.95, Tail::OneSided, &s).unwrap();
    assert!((c - oracle).abs() < 1e-6, "{c} vs {oracle}");
    let (p, _) = prob(&one, 10.0, &[-INF], &[oracle]);
    assert!((p - 0.95).abs() < 1e-6);

    let oracle = bisect(normal_cdf_simpson, 0.95f64.powf(1.0 / 3.0), 0.0, 10.0);
    let c = equicoordinate_quantile(&CorrelationMatrix::identity(3), INF, 0.95, Tail::OneSided, &s).unwrap();
    assert!((c - oracle).abs() <= 1e-5, "{c} vs {oracle}");
}

#[test]
fn independent_orthant() {
    let (p, err) = prob(&CorrelationMatrix::identity(3), INF, &[-INF; 3], &[0.0; 3]);
    assert!((p - 0.125).abs() <= 2.0 * MvtSettings::default().abs_tol, "{p} ({err})");
}

#[test]
fn balanced_two_sided_quantile_against_brute_force() {
    let corr = dunnett_balanced(3);
    let c = equicoordinate_quantile(&corr, 20.0, 0.95, Tail::TwoSided, &MvtSettings::default()).unwrap();
    // regression value, first checked against the brute-force quantile below
    assert!((c - 2.540169).abs() < 1e-5, "{c}");

    let n = 1_000_000;
    let mut draws = mvt_max_draws(corr.as_slice(), 3, 20.0, true, n, 17);
    draws.sort_by(f64::total_cmp);
    let empirical = draws[(0.95 * n as f64) as usize];
    // standard error of a sample quantile: sqrt(p(1-p)/n) / density
    let h = 0.02;
    let within = draws.iter().filter(|&&x| (x - empirical).abs() <= h).count();
    let density = within as f64 / (n as f64 * 2.0 * h);
    let se = (0.95 * 0.05 / n as f64).sqrt() / density;
    assert!((c - empirical).abs() <= 3.0 * se, "{c} vs {empirical} (se {se})");
}

#[test]
fn quantile_round_trip() {
    let s = MvtSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (q, df) in [(2, 5.0), (3, 20.0), (4, INF), (5, 7.5)] {
        let corr = CorrelationMatrix::new(q, random_correlation(q, &mut rng)).unwrap();
        for (tail, level) in [(Tail::OneSided, 0.95), (Tail::TwoSided, 0.9), (Tail::TwoSided, 0.99)] {
            let c = equicoordinate_quantile(&corr, df, level, tail, &s).unwrap();
            let back = equicoordinate_prob(&corr, df, c, tail, &s).unwrap().prob;
            assert!((back - level).abs() <= 2.0 * s.abs_tol, "q {q} df {df} {tail:?}: {back}");
        }
    }
}

/// Problems with a mix of finite and infinite limits.
fn random_limits(q: usize, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    (0..q)
        .map(|_| {
            let a = rng.random_range(-2.5..1.0);
            let b = a + rng.random_range(0.3..3.0);
            match rng.random_range(0..4) {
                0 => (-INF, b),
                1 => (a, INF),
                _ => (a, b),
            }
        })
        .unzip()
}

#[test]
fn error_estimate_covers_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let problems = 40;
    let mut covered = 0;
    for k in 0..problems {
        let q = rng.random_range(2..=6);
        let df = [3.0, 7.5, 20.0, INF][k % 4];
        let corr = CorrelationMatrix::new(q, random_correlation(q, &mut rng)).unwrap();
        let (lower, upper) = random_limits(q, &mut rng);
        let (p, err) = prob(&corr, df, &lower, &upper);
        let (mc, se) = mvt_monte_carlo(corr.as_slice(), q, df, &lower, &upper, 1_000_000, 100 + k as u64);
        covered += usize::from((p - mc).abs() <= 3.0 * (err * err + se * se).sqrt());
    }
    assert!(covered as f64 >= 0.95 * problems as f64, "{covered}/{problems}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nested_rectangles(seed in any::<u64>(), grow in 0.0f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.random_range(2..=5);
        let df = [3.0, 20.0, INF][rng.random_range(0..3)];
        let corr = CorrelationMatrix::new(q, random_correlation(q, &mut rng)).unwrap();
        let (lower, upper) = random_limits(q, &mut rng);
        let wider_lower: Vec<f64> = lower.iter().map(|a| a - grow).collect();
        let wider_upper: Vec<f64> = upper.iter().map(|b| b + grow).collect();
        let (inner, e1) = prob(&corr, df, &lower, &upper);
        let (outer, e2) = prob(&corr, df, &wider_lower, &wider_upper);
        prop_assert!(outer >= inner - 2.0 * (e1 + e2), "{inner} -> {outer}");
    }

    #[test]
    fn permutation_invariance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.random_range(2..=6);
        let df = [3.0, 7.5, INF][rng.random_range(0..3)];
        let corr = CorrelationMatrix::new(q, random_correlation(q, &mut rng)).unwrap();
        let (lower, upper) = random_limits(q, &mut rng);
        let mut perm: Vec<usize> = (0..q).collect();
        perm.rotate_left(rng.random_range(0..q));
        perm.swap(0, q - 1);
        let permuted = corr.permuted(&perm);
        let pl: Vec<f64> = perm.iter().map(|&i| lower[i]).collect();
        let pu: Vec<f64> = perm.iter().map(|&i| upper[i]).collect();
        let (a, e1) = prob(&corr, df, &lower, &upper);
        let (b, e2) = prob(&permuted, df, &pl, &pu);
        prop_assert!((a - b).abs() <= 2.0 * (e1 + e2), "{a} vs {b}");
    }

    #[test]
    fn identity_correlation_factorizes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = rng.random_range(2..=6);
        let (lower, upper) = random_limits(q, &mut rng);
        let (p, _) = prob(&CorrelationMatrix::identity(q), INF, &lower, &upper);
        let product: f64 = lower
            .iter()
            .zip(&upper)
            .map(|(&a, &b)| {
                let fa = if a.is_finite() { normal_cdf_simpson(a) } else { 0.0 };
                let fb = if b.is_finite() { normal_cdf_simpson(b) } else { 1.0 };
                fb - fa
            })
            .product();
        prop_assert!((p - product).abs() <= 2.0 * MvtSettings::default().abs_tol, "{p} vs {product}");
    }
}
