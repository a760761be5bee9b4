use mct_core::contrasts::ContrastMatrix;
use mct_core::data::GroupSummary;
use mct_core::{
    contrast_correlation, correlation_plugin, correlation_pooled, dunnett_contrasts, validate,
    Validity,
};
use proptest::prelude::*;

fn summaries(ns: &[usize], vars: &[f64]) -> Vec<GroupSummary<f64>> {
    ns.iter()
        .zip(vars)
        .map(|(&n, &var)| GroupSummary {
            label: String::new(),
            n,
            mean: 0.0,
            var,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dunnett_rows_are_valid(k in 1usize..12) {
        let cm = dunnett_contrasts::<f64>(k).unwrap();
        prop_assert_eq!(cm.q(), k);
        prop_assert!(validate(&cm).is_ok());
        for (i, row) in cm.rows().iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<f64>(), 0.0);
            prop_assert_eq!(row.iter().filter(|&&c| c > 0.0).count(), 1);
            prop_assert_eq!(row.iter().filter(|&&c| c < 0.0).count(), 1);
            prop_assert_eq!(row[0], -1.0);
            prop_assert_eq!(row[i + 1], 1.0);
        }
    }

    #[test]
    fn pooled_matches_dunnett_closed_form(ns in prop::collection::vec(1usize..60, 2..9)) {
        let k = ns.len() - 1;
        let cm = dunnett_contrasts::<f64>(k).unwrap();
        let r = correlation_pooled(&cm, &ns).unwrap();
        let n0 = ns[0] as f64;
        for i in 0..k {
            prop_assert_eq!(r.get(i, i), 1.0);
            for j in 0..k {
                if i == j {
                    continue;
                }
                let (ni, nj) = (ns[i + 1] as f64, ns[j + 1] as f64);
                let closed = (ni * nj / ((n0 + ni) * (n0 + nj))).sqrt();
                prop_assert!((r.get(i, j) - closed).abs() <= 1e-12);
                prop_assert!(r.get(i, j) > 0.0 && r.get(i, j) < 1.0);
            }
        }
    }

    #[test]
    fn pooled_invariant_to_row_scaling(
        ns in prop::collection::vec(2usize..30, 4),
        scales in prop::collection::vec(0.01f64..100.0, 3),
    ) {
        let base = dunnett_contrasts::<f64>(3).unwrap();
        let rows: Vec<Vec<f64>> = base
            .rows()
            .iter()
            .zip(&scales)
            .map(|(r, s)| r.iter().map(|c| c * s).collect())
            .collect();
        let scaled = ContrastMatrix::new(rows, base.labels().to_vec()).unwrap();
        let a = correlation_pooled(&base, &ns).unwrap();
        let b = correlation_pooled(&scaled, &ns).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn plugin_with_equal_variances_is_pooled(
        ns in prop::collection::vec(2usize..40, 2..7),
        var in 0.001f64..1000.0,
    ) {
        let cm = dunnett_contrasts::<f64>(ns.len() - 1).unwrap();
        let pooled = correlation_pooled(&cm, &ns).unwrap();
        let plugin = correlation_plugin(&cm, &summaries(&ns, &vec![var; ns.len()])).unwrap();
        for (x, y) in pooled.as_slice().iter().zip(plugin.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn plugin_is_a_correlation_matrix(
        ns in prop::collection::vec(2usize..40, 2..7),
        vars in prop::collection::vec(0.01f64..100.0, 7),
    ) {
        let cm = dunnett_contrasts::<f64>(ns.len() - 1).unwrap();
        let r = correlation_plugin(&cm, &summaries(&ns, &vars[..ns.len()])).unwrap();
        let q = r.dim();
        for i in 0..q {
            prop_assert_eq!(r.get(i, i), 1.0);
            for j in 0..q {
                prop_assert_eq!(r.get(i, j), r.get(j, i));
                if i != j {
                    prop_assert!(r.get(i, j) > 0.0 && r.get(i, j) < 1.0);
                }
            }
        }
    }
}

#[test]
fn published_contrasts_for_three_treatments() {
    let cm = dunnett_contrasts::<f64>(3).unwrap();
    assert_eq!(
        cm.rows(),
        &[
            vec![-1.0, 1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.0, 1.0],
        ]
    );
    assert!(dunnett_contrasts::<f64>(0).is_err());
}

#[test]
fn sign_condition_violations() {
    for row in [vec![1.0, 1.0, -2.0], vec![-1.0, 0.5, 0.5], vec![-1.0, 1.0, 0.5]] {
        let cm = ContrastMatrix::new(vec![row.clone()], vec!["c".into()]).unwrap();
        assert!(matches!(validate(&cm), Validity::Violation { row: 0, .. }), "{row:?}");
    }
}

#[test]
fn balanced_and_unbalanced_pooled_values() {
    let cm = dunnett_contrasts::<f64>(3).unwrap();
    let r = correlation_pooled(&cm, &[6, 6, 6, 6]).unwrap();
    assert!((r.get(0, 1) - 0.5).abs() < 1e-15);
    let r = correlation_pooled(&cm, &[9, 5, 5, 5]).unwrap();
    assert!((r.get(1, 2) - 5.0 / 14.0).abs() < 1e-15);
    let one = correlation_pooled(&dunnett_contrasts::<f64>(1).unwrap(), &[3, 4]).unwrap();
    assert_eq!(one.as_slice(), &[1.0]);
}

#[test]
fn plugin_variance_weights() {
    let cm = dunnett_contrasts::<f64>(2).unwrap();
    let r = correlation_plugin(&cm, &summaries(&[6, 6, 6], &[1.0, 1.0, 16.0])).unwrap();
    assert!((r.get(0, 1) - 1.0 / 34f64.sqrt()).abs() < 1e-15);
    // generic form with explicit weights
    let g = contrast_correlation(&cm, &[1.0 / 6.0, 1.0 / 6.0, 16.0 / 6.0]).unwrap();
    assert_eq!(g.get(0, 1), r.get(0, 1));
    assert!(correlation_plugin(&cm, &summaries(&[6, 6, 6], &[0.0, 0.0, 1.0])).is_err());
}
