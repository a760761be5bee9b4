mod common;

use common::normal_groups;
use mct_core::{hc_covariance, Dataset, HcFlavor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const REPS: u64 = 1000;
const N: usize = 20;

/// Mean and standard error of each group's diagonal entry over `REPS`
/// balanced homoscedastic datasets with unit variance.
fn diagonal_means(flavor: HcFlavor) -> Vec<(f64, f64)> {
    let mut sum = [0.0; 4];
    let mut sum_sq = [0.0; 4];
    for seed in 0..REPS {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let ds = Dataset::from_groups(&normal_groups(&[0.0; 4], &[1.0; 4], &[N; 4], &mut rng)).unwrap();
        let cov = hc_covariance(&ds, flavor).unwrap();
        for g in 0..4 {
            for (h, &c) in cov[g].iter().enumerate() {
                if h != g {
                    assert_eq!(c, 0.0);
                }
            }
            sum[g] += cov[g][g];
            sum_sq[g] += cov[g][g] * cov[g][g];
        }
    }
    let r = REPS as f64;
    (0..4)
        .map(|g| {
            let mean = sum[g] / r;
            let var = (sum_sq[g] / r - mean * mean) * r / (r - 1.0);
            (mean, (var / r).sqrt())
        })
        .collect()
}

#[test]
fn hc3_diagonal_within_five_percent_of_one_over_n() {
    for (mean, _) in diagonal_means(HcFlavor::Hc3) {
        let target = 1.0 / N as f64;
        assert!(
            (mean - target).abs() <= 0.05 * target,
            "mean diagonal {mean}, target {target}"
        );
    }
}

#[test]
fn hc_diagonals_match_their_expectations() {
    // E[s^2] = 1, so E[HC3] = 1/(n-1) and E[HC0] = (n-1)/n^2.
    let n = N as f64;
    for (flavor, expected) in [(HcFlavor::Hc3, 1.0 / (n - 1.0)), (HcFlavor::Hc0, (n - 1.0) / (n * n))] {
        for (mean, se) in diagonal_means(flavor) {
            assert!((mean - expected).abs() <= 3.0 * se, "{flavor:?}: {mean} vs {expected} (se {se})");
        }
    }
}
