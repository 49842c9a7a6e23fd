//! Seed-to-hashtag similarities via the modified random walk: other-seed
//! blocking, entropy dampening of general hashtags, row normalization, and
//! fixed-step visit-probability accumulation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::HashtagGraph;
use crate::ingest::SeedSet;
use crate::Scalar;

/// How entropy dampening rescales the working copy of the graph before a
/// per-seed walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampeningMode {
    /// Every edge incident to a non-seed hashtag `i` is scaled by
    /// `(1 - E_i) / d_i`; an edge between two non-seed hashtags receives
    /// both endpoint factors. Entering a general hashtag becomes unlikely
    /// from anywhere. This is the default.
    AllIncident,
    /// Only hashtag-to-seed entries `A[i][s]` are rescaled, leaving edges
    /// between general hashtags untouched. Kept for comparison.
    #[serde(rename = "seed-edges")]
    SeedEdgesOnly,
    /// No dampening at all.
    Off,
}

/// Walk parameters. Entropies always use the natural logarithm normalized
/// by `ln(t)`, which makes the base irrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Number of walk steps; visit probabilities are summed over steps
    /// `1..=rho`.
    pub rho: usize,
    pub dampening: DampeningMode,
    /// Zero out the rows and columns of every seed other than the active
    /// one. Disabling this (together with dampening) degenerates the
    /// engine into a plain random walk.
    pub block_other_seeds: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            rho: 10,
            dampening: DampeningMode::AllIncident,
            block_other_seeds: true,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rho == 0 {
            return Err(Error::InvalidConfig("rho must be at least 1".into()));
        }
        Ok(())
    }
}

/// Normalized entropy of a non-negative weight vector: `0` for mass
/// concentrated on one entry (or no mass at all), `1` for a uniform
/// spread. Zero entries contribute nothing.
pub fn normalized_entropy<F: Scalar>(weights: &[F]) -> F {
    if weights.len() < 2 {
        return F::zero();
    }
    let total = weights.iter().fold(F::zero(), |acc, &w| acc + w);
    if total <= F::zero() {
        return F::zero();
    }
    let mut acc = F::zero();
    for &w in weights {
        if w > F::zero() {
            let p = w / total;
            acc -= p * p.ln();
        }
    }
    let e = acc / F::from_len(weights.len()).ln();
    e.max(F::zero()).min(F::one())
}

/// Seed-adjacency entropy of hashtag `i`: the normalized entropy of its
/// edge weights to the `t` seeds in the unmodified graph. A value near 1
/// marks a general hashtag used across stances; a hashtag adjacent to no
/// seed gets 0. Seed hashtags themselves are assigned 0 (their entropy is
/// never consumed).
pub fn entropy<F: Scalar>(graph: &HashtagGraph<F>, seed_indices: &[usize], i: usize) -> F {
    if seed_indices.contains(&i) {
        return F::zero();
    }
    let weights: Vec<F> = seed_indices.iter().map(|&s| graph.weight(i, s)).collect();
    normalized_entropy(&weights)
}

/// Seed-adjacency entropies for every hashtag.
pub fn seed_entropies<F: Scalar>(graph: &HashtagGraph<F>, seed_indices: &[usize]) -> Vec<F> {
    (0..graph.node_count())
        .map(|i| entropy(graph, seed_indices, i))
        .collect()
}

/// Row-stochastic-or-zero transition matrix for one per-seed walk.
#[derive(Debug, Clone)]
pub struct Transition<F: Scalar = f64> {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    probs: Vec<F>,
}

impl<F: Scalar> Transition<F> {
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Outgoing entries of row `i` as (column, probability) slices.
    pub fn row(&self, i: usize) -> (&[u32], &[F]) {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        (&self.col_indices[lo..hi], &self.probs[lo..hi])
    }

    /// Dense copy, for small-instance inspection and oracles.
    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut dense = vec![vec![F::zero(); self.n]; self.n];
        for i in 0..self.n {
            let (cols, probs) = self.row(i);
            for (&j, &p) in cols.iter().zip(probs) {
                dense[i][j as usize] = p;
            }
        }
        dense
    }
}

/// Build the transition matrix for the walk of seed class `active`:
/// block the other seeds' rows and columns, apply entropy dampening, then
/// row-normalize (all-zero rows stay zero and absorb walk mass).
///
/// The entropies and the degrees both refer to the unmodified graph, so
/// they are identical across the `t` per-seed walks.
pub fn build_transition<F: Scalar>(
    graph: &HashtagGraph<F>,
    seed_indices: &[usize],
    active: usize,
    config: &WalkConfig,
) -> Transition<F> {
    let entropies = seed_entropies(graph, seed_indices);
    build_transition_with(graph, seed_indices, active, &entropies, config)
}

/// [`build_transition`] with externally supplied entropies. Exposed so the
/// dampening response can be probed directly.
pub fn build_transition_with<F: Scalar>(
    graph: &HashtagGraph<F>,
    seed_indices: &[usize],
    active: usize,
    entropies: &[F],
    config: &WalkConfig,
) -> Transition<F> {
    let m = graph.node_count();
    let mut is_seed = vec![false; m];
    for &s in seed_indices {
        is_seed[s] = true;
    }
    let mut blocked = vec![false; m];
    if config.block_other_seeds {
        for &s in seed_indices {
            if s != seed_indices[active] {
                blocked[s] = true;
            }
        }
    }

    // Per-node incident factor (1 - E_i) / d_i; seeds are exempt.
    let factor = |i: usize| -> F {
        if is_seed[i] {
            F::one()
        } else {
            let d = graph.degree(i);
            if d == 0 {
                F::one()
            } else {
                (F::one() - entropies[i]) / F::from_count(d as u64)
            }
        }
    };

    let mut row_offsets = Vec::with_capacity(m + 1);
    let mut col_indices: Vec<u32> = Vec::new();
    let mut probs: Vec<F> = Vec::new();
    row_offsets.push(0);

    for i in 0..m {
        let (cols, weights) = graph.row(i);
        let row_start = probs.len();
        if !blocked[i] {
            for (&j, &w) in cols.iter().zip(weights) {
                let j = j as usize;
                if blocked[j] {
                    continue;
                }
                let adjusted = match config.dampening {
                    DampeningMode::Off => w,
                    DampeningMode::AllIncident => w * factor(i) * factor(j),
                    DampeningMode::SeedEdgesOnly => {
                        if is_seed[j] && !is_seed[i] {
                            w * factor(i)
                        } else {
                            w
                        }
                    }
                };
                if adjusted > F::zero() {
                    col_indices.push(j as u32);
                    probs.push(adjusted);
                }
            }
        }
        let row_sum = probs[row_start..].iter().fold(F::zero(), |acc, &p| acc + p);
        if row_sum > F::zero() {
            for p in &mut probs[row_start..] {
                *p /= row_sum;
            }
        }
        row_offsets.push(probs.len());
    }

    Transition {
        n: m,
        row_offsets,
        col_indices,
        probs,
    }
}

/// Run a `rho`-step walk from `start` and return the per-node sums of the
/// visit probabilities over steps `1..=rho`.
pub fn run_walk<F: Scalar>(transition: &Transition<F>, start: usize, rho: usize) -> Vec<F> {
    walk_trace(transition, start, rho).similarities
}

/// A walk along with its per-step visit-probability vectors, for
/// property checks on the walk dynamics.
pub struct WalkTrace<F: Scalar = f64> {
    /// Per-node sums over steps `1..=rho`.
    pub similarities: Vec<F>,
    /// `steps[z - 1]` is the visit-probability vector after step `z`.
    pub steps: Vec<Vec<F>>,
}

pub fn walk_trace<F: Scalar>(transition: &Transition<F>, start: usize, rho: usize) -> WalkTrace<F> {
    let n = transition.node_count();
    let mut current = vec![F::zero(); n];
    current[start] = F::one();
    let mut similarities = vec![F::zero(); n];
    let mut steps = Vec::with_capacity(rho);

    for _ in 0..rho {
        let mut next = vec![F::zero(); n];
        for i in 0..n {
            let mass = current[i];
            if mass == F::zero() {
                continue;
            }
            let (cols, probs) = transition.row(i);
            for (&j, &p) in cols.iter().zip(probs) {
                next[j as usize] += p * mass;
            }
        }
        for (s, &v) in similarities.iter_mut().zip(&next) {
            *s += v;
        }
        steps.push(next.clone());
        current = next;
    }

    WalkTrace {
        similarities,
        steps,
    }
}

/// Seed-to-hashtag similarity matrix: one row per stance class, aligned
/// with the seed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScores<F: Scalar = f64> {
    scores: Vec<Vec<F>>,
}

impl<F: Scalar> SimilarityScores<F> {
    pub fn from_rows(scores: Vec<Vec<F>>) -> Self {
        Self { scores }
    }

    /// Number of stance classes `t`.
    pub fn class_count(&self) -> usize {
        self.scores.len()
    }

    pub fn hashtag_count(&self) -> usize {
        self.scores.first().map_or(0, Vec::len)
    }

    pub fn row(&self, c: usize) -> &[F] {
        &self.scores[c]
    }

    pub fn value(&self, c: usize, i: usize) -> F {
        self.scores[c][i]
    }

    /// The `t` similarities of hashtag `i`, in class order.
    pub fn column(&self, i: usize) -> Vec<F> {
        self.scores.iter().map(|row| row[i]).collect()
    }
}

/// Run the per-seed walks for every class and stack their similarity
/// rows. Each walk builds its own transition from a fresh copy of the
/// graph; the walks are independent and run in parallel.
pub fn all_similarities<F: Scalar>(
    graph: &HashtagGraph<F>,
    seeds: &SeedSet,
    config: &WalkConfig,
) -> Result<SimilarityScores<F>> {
    config.validate()?;
    let seed_indices = graph.resolve_seeds(seeds)?;

    let entropies = seed_entropies(graph, &seed_indices);
    let rows: Vec<Vec<F>> = (0..seed_indices.len())
        .into_par_iter()
        .map(|c| {
            let transition = build_transition_with(graph, &seed_indices, c, &entropies, config);
            run_walk(&transition, seed_indices[c], config.rho)
        })
        .collect();

    Ok(SimilarityScores::from_rows(rows))
}
