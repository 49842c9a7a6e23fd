//! Reference baselines benchmarked against the entropy-dampened walk:
//! random assignment (RDM), a plain co-occurrence random walk (SRM),
//! cosine similarity to seed columns (HSM), and clamped label
//! propagation (LPM).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{
    argmax_class, HashtagAssignment, StanceAssignments, TieFlag, UserAssignment,
};
use crate::error::{Error, Result};
use crate::graph::{build_cooccurrence_graph, HashtagGraph};
use crate::ingest::{PostRecord, SeedSet, SharingMatrix};
use crate::walk::SimilarityScores;
use crate::Scalar;

/// Knobs shared by the baselines: the RDM generator seed, the SRM walk
/// length, and the LPM iteration budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub rng_seed: u64,
    pub rho: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            rho: 10,
            max_iterations: 1000,
            tolerance: 1e-8,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rho == 0 {
            return Err(Error::InvalidConfig("rho must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Assign every hashtag and user to a uniformly random class, fully
/// determined by `rng_seed`. Hashtags are drawn first, then users, both
/// in index order.
pub fn rdm_classify<F: Scalar>(
    matrix: &SharingMatrix,
    class_count: usize,
    rng_seed: u64,
) -> StanceAssignments<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let hashtags = (0..matrix.hashtag_count())
        .map(|_| HashtagAssignment {
            class: Some(rng.gen_range(0..class_count)),
            intensity: None,
            tie: TieFlag::None,
        })
        .collect();
    let users = (0..matrix.user_count())
        .map(|_| {
            let class = rng.gen_range(0..class_count);
            let mut inclination = vec![F::zero(); class_count];
            inclination[class] = F::one();
            UserAssignment {
                class: Some(class),
                inclination,
                tie: TieFlag::None,
            }
        })
        .collect();
    StanceAssignments { hashtags, users }
}

/// Row-normalize a graph into dense-CSR transition rows; all-zero rows
/// stay empty. This is the plain normalization the co-occurrence
/// baselines use: no seed blocking, no dampening.
fn plain_transition_rows<F: Scalar>(graph: &HashtagGraph<F>) -> Vec<(Vec<u32>, Vec<F>)> {
    (0..graph.node_count())
        .map(|i| {
            let (cols, weights) = graph.row(i);
            let sum = weights.iter().fold(F::zero(), |acc, &w| acc + w);
            if sum > F::zero() {
                (cols.to_vec(), weights.iter().map(|&w| w / sum).collect())
            } else {
                (Vec::new(), Vec::new())
            }
        })
        .collect()
}

/// Similarities from a plain fixed-step random walk on the row-normalized
/// graph, one row per seed.
pub fn plain_walk_similarities<F: Scalar>(
    graph: &HashtagGraph<F>,
    seed_indices: &[usize],
    rho: usize,
) -> SimilarityScores<F> {
    let rows = plain_transition_rows(graph);
    let n = graph.node_count();
    let scores = seed_indices
        .iter()
        .map(|&start| {
            let mut current = vec![F::zero(); n];
            current[start] = F::one();
            let mut sums = vec![F::zero(); n];
            for _ in 0..rho {
                let mut next = vec![F::zero(); n];
                for i in 0..n {
                    let mass = current[i];
                    if mass == F::zero() {
                        continue;
                    }
                    let (cols, probs) = &rows[i];
                    for (&j, &p) in cols.iter().zip(probs) {
                        next[j as usize] += p * mass;
                    }
                }
                for (s, &v) in sums.iter_mut().zip(&next) {
                    *s += v;
                }
                current = next;
            }
            sums
        })
        .collect();
    SimilarityScores::from_rows(scores)
}

fn hashtags_from_similarities<F: Scalar>(
    scores: &SimilarityScores<F>,
) -> Vec<HashtagAssignment<F>> {
    (0..scores.hashtag_count())
        .map(|i| match argmax_class(&scores.column(i)) {
            None => HashtagAssignment::unclassified(),
            Some((class, tied)) => HashtagAssignment {
                class: Some(class),
                intensity: None,
                tie: if tied { TieFlag::Exact } else { TieFlag::None },
            },
        })
        .collect()
}

/// Assign each user to the class receiving most of their shares; the
/// inclination vector carries the per-class share fractions. Users whose
/// shares all fall on unclassified hashtags stay unclassified.
pub fn majority_share_users<F: Scalar>(
    matrix: &SharingMatrix,
    hashtags: &[HashtagAssignment<F>],
    class_count: usize,
) -> Vec<UserAssignment<F>> {
    (0..matrix.user_count())
        .map(|k| {
            let total = F::from_count(matrix.user_total(k));
            let mut shares = vec![F::zero(); class_count];
            let (cols, counts) = matrix.user_row(k);
            for (&i, &count) in cols.iter().zip(counts) {
                if let Some(class) = hashtags[i as usize].class {
                    shares[class] += F::from_count(count as u64) / total;
                }
            }
            match argmax_class(&shares) {
                None => UserAssignment {
                    class: None,
                    inclination: shares,
                    tie: TieFlag::None,
                },
                Some((class, tied)) => UserAssignment {
                    class: Some(class),
                    inclination: shares,
                    tie: if tied { TieFlag::Exact } else { TieFlag::None },
                },
            }
        })
        .collect()
}

/// Simple Random Walk baseline: a plain fixed-step walk on the hashtag
/// co-occurrence graph, hashtag classes by largest similarity, users by
/// majority share count.
pub fn srm_classify<F: Scalar>(
    records: &[PostRecord],
    matrix: &SharingMatrix,
    seeds: &SeedSet,
    config: &BaselineConfig,
) -> Result<StanceAssignments<F>> {
    config.validate()?;
    let graph = build_cooccurrence_graph::<F>(records, matrix)?;
    let seed_indices = graph.resolve_seeds(seeds)?;
    let scores = plain_walk_similarities(&graph, &seed_indices, config.rho);
    let hashtags = hashtags_from_similarities(&scores);
    let users = majority_share_users(matrix, &hashtags, seeds.class_count());
    Ok(StanceAssignments { hashtags, users })
}

/// Cosine similarities between every hashtag's user-count column and each
/// seed's column.
pub fn cosine_to_seeds<F: Scalar>(
    matrix: &SharingMatrix,
    seed_indices: &[usize],
) -> SimilarityScores<F> {
    let m = matrix.hashtag_count();
    // Column views: (user, count) lists sorted by user index.
    let mut columns: Vec<Vec<(u32, u32)>> = vec![Vec::new(); m];
    for k in 0..matrix.user_count() {
        let (cols, counts) = matrix.user_row(k);
        for (&i, &c) in cols.iter().zip(counts) {
            columns[i as usize].push((k as u32, c));
        }
    }
    let norms: Vec<F> = columns
        .iter()
        .map(|col| {
            col.iter()
                .fold(F::zero(), |acc, &(_, c)| {
                    acc + F::from_count(c as u64) * F::from_count(c as u64)
                })
                .sqrt()
        })
        .collect();

    let dot = |a: &[(u32, u32)], b: &[(u32, u32)]| -> F {
        let mut acc = F::zero();
        let (mut x, mut y) = (0usize, 0usize);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    acc += F::from_count(a[x].1 as u64) * F::from_count(b[y].1 as u64);
                    x += 1;
                    y += 1;
                }
            }
        }
        acc
    };

    let rows = seed_indices
        .iter()
        .map(|&s| {
            (0..m)
                .map(|i| {
                    let denom = norms[i] * norms[s];
                    if denom > F::zero() {
                        dot(&columns[i], &columns[s]) / denom
                    } else {
                        F::zero()
                    }
                })
                .collect()
        })
        .collect();
    SimilarityScores::from_rows(rows)
}

/// Hashtag Similarity baseline: hashtag classes by cosine similarity of
/// sharing columns to the seed columns, users by majority share count.
pub fn hsm_classify<F: Scalar>(
    matrix: &SharingMatrix,
    seeds: &SeedSet,
) -> Result<StanceAssignments<F>> {
    let seed_indices = seeds.resolve(matrix)?;
    let scores = cosine_to_seeds(matrix, &seed_indices);
    let hashtags = hashtags_from_similarities(&scores);
    let users = majority_share_users(matrix, &hashtags, seeds.class_count());
    Ok(StanceAssignments { hashtags, users })
}

/// Outcome of label propagation: the assignments plus whether the
/// iteration reached its tolerance within the budget.
pub struct LpmOutcome<F: Scalar = f64> {
    pub assignments: StanceAssignments<F>,
    pub converged: bool,
    pub iterations: usize,
}

/// Label Propagation baseline on the co-occurrence graph: seed rows are
/// clamped to their one-hot labels each sweep, everything else takes the
/// weighted average of its neighbors, until the largest entry change
/// drops below the tolerance or the budget runs out (which yields a
/// warning flag, not an error).
pub fn lpm_classify<F: Scalar>(
    records: &[PostRecord],
    matrix: &SharingMatrix,
    seeds: &SeedSet,
    config: &BaselineConfig,
) -> Result<LpmOutcome<F>> {
    config.validate()?;
    let graph = build_cooccurrence_graph::<F>(records, matrix)?;
    let seed_indices = graph.resolve_seeds(seeds)?;
    let t = seeds.class_count();
    let n = graph.node_count();
    let rows = plain_transition_rows(&graph);
    let tolerance = F::from_f64(config.tolerance).expect("tolerance fits scalar");

    let mut labels = vec![F::zero(); n * t];
    for (c, &s) in seed_indices.iter().enumerate() {
        labels[s * t + c] = F::one();
    }

    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..config.max_iterations {
        iterations += 1;
        let mut next = vec![F::zero(); n * t];
        for i in 0..n {
            let base = i * t;
            if labels[base..base + t].iter().all(|&l| l == F::zero()) {
                continue;
            }
            let (cols, probs) = &rows[i];
            for (&j, &p) in cols.iter().zip(probs) {
                let out = j as usize * t;
                for c in 0..t {
                    next[out + c] += p * labels[base + c];
                }
            }
        }
        for (c, &s) in seed_indices.iter().enumerate() {
            let base = s * t;
            for x in &mut next[base..base + t] {
                *x = F::zero();
            }
            next[base + c] = F::one();
        }
        let delta = labels
            .iter()
            .zip(&next)
            .fold(F::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        labels = next;
        if delta < tolerance {
            converged = true;
            break;
        }
    }

    let rows_view: Vec<Vec<F>> = (0..t)
        .map(|c| (0..n).map(|i| labels[i * t + c]).collect())
        .collect();
    let scores = SimilarityScores::from_rows(rows_view);
    let hashtags = hashtags_from_similarities(&scores);
    let users = majority_share_users(matrix, &hashtags, t);
    Ok(LpmOutcome {
        assignments: StanceAssignments { hashtags, users },
        converged,
        iterations,
    })
}
