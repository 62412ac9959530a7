//! Small shared helpers: seeded random sources, seed derivation, nearest
//! neighbour search and vote tallies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random source used throughout the crate. ChaCha keeps streams
/// reproducible across platforms.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a parent seed and a stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Derives a child seed from a textual key (dataset names, variant names).
pub fn derive_seed_str(seed: u64, key: &str) -> u64 {
    // FNV-1a, stable across runs and platforms unlike std's hasher.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    derive_seed(seed, h)
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices and Euclidean distances of the `k` rows nearest to `query`, in
/// ascending distance order. Ties go to the lower row index. Rows listed in
/// `exclude` are skipped.
pub fn k_nearest<'a, I>(rows: I, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<(usize, f64)>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut all: Vec<(usize, f64)> = rows
        .into_iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, r)| (i, squared_distance(r, query)))
        .collect();
    let k = k.min(all.len());
    if k == 0 {
        return Vec::new();
    }
    let cmp = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, cmp);
        all.truncate(k);
    }
    all.sort_by(cmp);
    all.into_iter().map(|(i, d)| (i, d.sqrt())).collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Plurality vote over class ids; the lowest class id wins ties.
pub fn plurality<I: IntoIterator<Item = usize>>(votes: I, n_classes: usize) -> usize {
    let mut tally = vec![0usize; n_classes];
    for v in votes {
        tally[v] += 1;
    }
    argmax(&tally)
}

/// Weighted vote over (class id, weight) pairs; the lowest class id wins ties.
pub fn weighted_vote<I: IntoIterator<Item = (usize, u32)>>(votes: I, n_classes: usize) -> usize {
    let mut tally = vec![0u64; n_classes];
    for (c, w) in votes {
        tally[c] += u64::from(w);
    }
    argmax(&tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_orders_by_distance_then_index() {
        let rows: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![2.0], vec![10.0]];
        let nn = k_nearest(rows.iter().map(|r| r.as_slice()), &[1.4], 2, None);
        assert_eq!(nn.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2]);

        // equidistant rows: lower index first
        let nn = k_nearest(rows.iter().map(|r| r.as_slice()), &[1.0], 3, None);
        assert_eq!(nn.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 0, 2]);
    }

    #[test]
    fn nearest_with_exclusion_and_oversized_k() {
        let rows: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![2.0]];
        let nn = k_nearest(rows.iter().map(|r| r.as_slice()), &[0.0], 10, Some(0));
        assert_eq!(nn.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn votes_break_ties_low() {
        assert_eq!(plurality(vec![1, 2, 2, 1], 3), 1);
        assert_eq!(weighted_vote(vec![(2, 3), (0, 3)], 3), 0);
        assert_eq!(argmax(&[2, 2, 0]), 0);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed_str(7, "wine"), derive_seed_str(7, "wine"));
        assert_ne!(derive_seed_str(7, "wine"), derive_seed_str(7, "glass"));
    }
}
