//! Reference oracles and seeded random-instance generators backing the
//! test suites. Nothing here is used by the classification pipeline
//! itself; the oracles deliberately re-derive results by brute force.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ingest::SharingMatrix;
use crate::Scalar;

/// Path-enumeration similarities over a dense transition matrix: the
/// total probability of reaching each node at each step `1..=rho`, summed
/// over steps, by explicit recursion over all walks. Exponential in
/// `rho`, so only usable on small instances.
pub fn path_enumeration_similarities<F: Scalar>(
    dense: &[Vec<F>],
    start: usize,
    rho: usize,
) -> Vec<F> {
    let n = dense.len();
    let mut sums = vec![F::zero(); n];
    fn recurse<F: Scalar>(
        dense: &[Vec<F>],
        node: usize,
        prob: F,
        depth: usize,
        rho: usize,
        sums: &mut [F],
    ) {
        if depth == rho {
            return;
        }
        for next in 0..dense.len() {
            let p = dense[node][next];
            if p > F::zero() {
                sums[next] += prob * p;
                recurse(dense, next, prob * p, depth + 1, rho, sums);
            }
        }
    }
    recurse(dense, start, F::one(), 0, rho, &mut sums);
    sums
}

/// A deterministic random sharing matrix: up to `max_users` users and
/// `max_hashtags` hashtags with counts in `1..=max_count`. Every user and
/// hashtag index is forced to appear at least once so sizes are exact.
pub fn random_sharing_matrix(
    seed: u64,
    max_users: usize,
    max_hashtags: usize,
    max_count: u32,
) -> SharingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_users.max(2));
    let m = rng.gen_range(2..=max_hashtags.max(2));
    let mut triples = Vec::new();
    for k in 0..n {
        triples.push((
            format!("u{k}"),
            format!("h{}", rng.gen_range(0..m)),
            rng.gen_range(1..=max_count) as u64,
        ));
    }
    for i in 0..m {
        triples.push((
            format!("u{}", rng.gen_range(0..n)),
            format!("h{i}"),
            rng.gen_range(1..=max_count) as u64,
        ));
    }
    let extra = rng.gen_range(0..n * m);
    for _ in 0..extra {
        triples.push((
            format!("u{}", rng.gen_range(0..n)),
            format!("h{}", rng.gen_range(0..m)),
            rng.gen_range(1..=max_count) as u64,
        ));
    }
    SharingMatrix::from_triples(triples).expect("generated matrix is non-empty")
}
