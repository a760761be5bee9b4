use mct_core::sim::{mc_se, run_scenario, Scenario, TableId};
use mct_core::Method;

fn heteroscedastic(runs: usize, seed: u64) -> Scenario {
    Scenario::new(
        vec![5.0, 5.0, 4.5, 3.5],
        vec![1.0, 2.0, 1.0, 3.0],
        vec![8, 6, 10, 7],
        runs,
        seed,
    )
}

#[test]
fn worker_count_does_not_change_results() {
    let sc = heteroscedastic(300, 9);
    let run_with = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_scenario(&sc).unwrap())
    };
    assert_eq!(run_with(1), run_with(3));
}

#[test]
fn doubling_runs_divides_mc_se_by_root_two() {
    let r = run_scenario(&heteroscedastic(400, 2)).unwrap();
    for m in &r.methods {
        assert_eq!(m.mc_se, mc_se(m.anypairs, 400));
        let ratio = mc_se(m.anypairs, 400) / mc_se(m.anypairs, 800);
        if m.anypairs > 0.0 && m.anypairs < 1.0 {
            assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
        }
        for (&e, &se) in m.elementary.iter().zip(&m.elementary_se) {
            assert!(e <= m.anypairs);
            assert_eq!(se, mc_se(e, 400));
        }
    }
}

#[test]
fn rescaling_every_group_keeps_rates() {
    let base = Scenario::new(vec![0.0; 4], vec![1.0, 1.0, 1.0, 4.0], vec![6; 4], 500, 4);
    let mut scaled = base.clone();
    scaled.sds = base.sds.iter().map(|s| 0.999 * s).collect();
    let a = run_scenario(&base).unwrap();
    let b = run_scenario(&scaled).unwrap();
    for (x, y) in a.methods.iter().zip(&b.methods) {
        assert_eq!(x.anypairs, y.anypairs, "{}", x.method);
        assert_eq!(x.elementary, y.elementary, "{}", x.method);
    }
}

#[test]
fn permuting_treatments_permutes_rates() {
    let sc = heteroscedastic(2000, 5);
    let perm = [2, 0, 1];
    let mut permuted = sc.clone();
    for (slot, &from) in perm.iter().enumerate() {
        permuted.means[slot + 1] = sc.means[from + 1];
        permuted.sds[slot + 1] = sc.sds[from + 1];
        permuted.ns[slot + 1] = sc.ns[from + 1];
    }
    let a = run_scenario(&sc).unwrap();
    let b = run_scenario(&permuted).unwrap();
    for (x, y) in a.methods.iter().zip(&b.methods) {
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        let (sx, sy) = (sorted(&x.elementary), sorted(&y.elementary));
        for (r, s) in sx.iter().zip(&sy) {
            let se = mc_se(*r, 2000).max(mc_se(*s, 2000));
            assert!((r - s).abs() <= 3.0 * se, "{}: {sx:?} vs {sy:?}", x.method);
        }
    }
}

#[test]
fn welch_type_methods_hold_the_level_under_the_null() {
    let runs = 2000;
    for id in [TableId::H0Small, TableId::H0Moderate] {
        for row in id.rows() {
            let mut sc = row.scenario(runs, 11);
            sc.methods = vec![Method::WelchPi, Method::BonferroniWelch];
            let r = run_scenario(&sc).unwrap();
            for m in &r.methods {
                assert!(
                    m.anypairs <= sc.alpha + 3.0 * m.mc_se,
                    "{id} {:?} {}: {}",
                    row.sds,
                    m.method,
                    m.anypairs
                );
            }
        }
    }
}
