use imbdes::data::Dataset;
use imbdes::resample::{apply_multiclass, random_balance, ResampleParams, Resampled};
use imbdes::util::{argmax, rng_from_seed};
use imbdes::ResampleVariant;
use proptest::prelude::*;

fn blobs(counts: &[usize], seed: u64) -> Dataset {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            rows.push(vec![c as f64 + rng.random::<f64>(), rng.random::<f64>() * 3.0]);
            labels.push(c);
        }
    }
    Dataset::from_rows("b", &rows, labels, (0..counts.len()).map(|c| c.to_string()).collect()).unwrap()
}

fn counts_after(data: &Dataset, r: &Resampled) -> Vec<usize> {
    r.materialize(data).unwrap().class_counts()
}

const OVERSAMPLERS: [ResampleVariant; 4] =
    [ResampleVariant::BaSm, ResampleVariant::BaSm100, ResampleVariant::BaRm, ResampleVariant::BaRm100];

proptest! {
    #[test]
    fn synthetic_rows_stay_in_class_box(counts in proptest::collection::vec(2usize..25, 2..5), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        for variant in ResampleVariant::ALL {
            let r = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            for batch in &r.synthetic {
                let members = data.class_indices(batch.class);
                for row in &batch.rows {
                    for (j, &v) in row.iter().enumerate() {
                        let lo = members.iter().map(|&i| data.row(i)[j]).fold(f64::INFINITY, f64::min);
                        let hi = members.iter().map(|&i| data.row(i)[j]).fold(f64::NEG_INFINITY, f64::max);
                        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn oversamplers_keep_every_original_row(counts in proptest::collection::vec(2usize..25, 2..5), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        let majority = argmax(&data.class_counts());
        for variant in OVERSAMPLERS {
            let r = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(&r.kept, &(0..data.n_samples()).collect::<Vec<_>>());
            prop_assert!(r.synthetic.iter().all(|b| b.class != majority || b.is_empty()));
        }
    }

    #[test]
    fn smote_variant_equalizes(counts in proptest::collection::vec(2usize..40, 2..6), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        let maj = *counts.iter().max().unwrap();
        let r = apply_multiclass(&data, ResampleVariant::BaSm, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(counts_after(&data, &r), vec![maj; counts.len()]);
    }

    #[test]
    fn doubling_variants_add_at_most_the_class_size(counts in proptest::collection::vec(2usize..40, 2..6), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        let maj = *counts.iter().max().unwrap();
        for variant in [ResampleVariant::BaSm100, ResampleVariant::BaRm100] {
            let r = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            let after = counts_after(&data, &r);
            for (c, &n) in counts.iter().enumerate() {
                prop_assert_eq!(after[c], if n == maj { n } else { n + n.min(maj - n) });
            }
        }
    }

    #[test]
    fn random_balance_keeps_total(counts in proptest::collection::vec(2usize..40, 2..6), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        let r = random_balance(&data, 5, &mut rng_from_seed(seed)).unwrap();
        let after = counts_after(&data, &r);
        prop_assert_eq!(after.iter().sum::<usize>(), data.n_samples());
        prop_assert!(after.iter().all(|&n| n >= 2));
        prop_assert_eq!(random_balance(&data, 5, &mut rng_from_seed(seed)).unwrap(), r);
    }

    #[test]
    fn resampling_is_deterministic(counts in proptest::collection::vec(2usize..25, 2..5), seed in any::<u64>()) {
        let data = blobs(&counts, seed);
        for variant in ResampleVariant::ALL {
            let a = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            let b = apply_multiclass(&data, variant, &ResampleParams::default(), &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
