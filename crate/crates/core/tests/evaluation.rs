use imbdes::eval::metrics::{auc_multiclass, f_measure_weighted, fractional_ranks, g_mean, sensitivities};
use imbdes::eval::stats::sign_test_critical_value;
use imbdes::eval::{average_ranks, finner_stepdown};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<Vec<f64>>, Vec<usize>)> {
    (2usize..5, 6usize..50).prop_flat_map(|(l, n)| {
        (
            proptest::collection::vec(0..l, n),
            proptest::collection::vec(0..l, n),
            proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, l), n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #[test]
    fn metrics_ignore_sample_order((labels, preds, raw, perm) in instance()) {
        let scores: Vec<Vec<f64>> = raw.iter().map(|r| { let s: f64 = r.iter().sum::<f64>() + 1e-9; r.iter().map(|v| v / s).collect() }).collect();
        let p = |v: &Vec<usize>| perm.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let ps: Vec<Vec<f64>> = perm.iter().map(|&i| scores[i].clone()).collect();
        let (pl, pp) = (p(&labels), p(&preds));
        prop_assert!((f_measure_weighted(&preds, &labels).unwrap() - f_measure_weighted(&pp, &pl).unwrap()).abs() < 1e-12);
        prop_assert!((g_mean(&preds, &labels).unwrap() - g_mean(&pp, &pl).unwrap()).abs() < 1e-12);
        match (auc_multiclass(&scores, &labels), auc_multiclass(&ps, &pl)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn g_mean_bounds((labels, preds, _, _) in instance()) {
        let g = g_mean(&preds, &labels).unwrap();
        let sens = sensitivities(&preds, &labels).unwrap();
        let max = sens.iter().cloned().fold(0.0, f64::max);
        prop_assert!(g >= 0.0 && g <= max + 1e-12);
        prop_assert_eq!(g == 0.0, sens.contains(&0.0));
    }

    #[test]
    fn finner_rejections_are_monotone(p in proptest::collection::vec(0.0f64..1.0, 1..20), alpha in 0.001f64..0.2) {
        let reject = finner_stepdown(&p, alpha).unwrap();
        for a in 0..p.len() {
            for b in 0..p.len() {
                prop_assert!(!(reject[b] && p[a] < p[b] && !reject[a]));
            }
        }
    }

    #[test]
    fn critical_values_shrink_as_alpha_grows(n in 1u64..80, a in 0.001f64..0.3, b in 0.001f64..0.3) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        match (sign_test_critical_value(n, lo), sign_test_critical_value(n, hi)) {
            (Some(x), Some(y)) => prop_assert!(y <= x),
            (Some(_), None) => prop_assert!(false, "larger alpha lost its critical value"),
            _ => {}
        }
    }

    #[test]
    fn ranks_are_permutations_with_mean_ties(values in proptest::collection::vec(0u8..5, 1..12)) {
        let v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
        let r = fractional_ranks(&v);
        let m = v.len() as f64;
        prop_assert!((r.iter().sum::<f64>() - m * (m + 1.0) / 2.0).abs() < 1e-9);
        for i in 0..v.len() {
            for j in 0..v.len() {
                if v[i] == v[j] { prop_assert_eq!(r[i], r[j]); }
                if v[i] < v[j] { prop_assert!(r[i] < r[j]); }
            }
        }
    }
}

#[test]
fn average_ranks_of_dominant_method() {
    let table = vec![vec![0.9, 0.5], vec![0.8, 0.7], vec![0.6, 0.1]];
    let ranks = average_ranks(&table, vec!["a".into(), "b".into()], true).unwrap();
    assert_eq!(ranks.average, vec![1.0, 2.0]);
    assert_eq!(ranks.best(), 0);
}
