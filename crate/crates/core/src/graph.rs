//! Projection of the sharing matrix onto the weighted hashtag-sharing
//! graph, plus the co-occurrence graph the co-occurrence baselines run on.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{PostRecord, SharingMatrix};
use crate::Scalar;

/// Which projection produced the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFlavor {
    /// Weights in `[0, 1]`: common-sharing mass normalized by the smaller
    /// marginal of the pair.
    Sharing,
    /// Non-negative post co-occurrence counts.
    Cooccurrence,
}

/// Sparse symmetric weighted graph over hashtags with a zero diagonal.
#[derive(Debug, Clone)]
pub struct HashtagGraph<F: Scalar = f64> {
    hashtags: Vec<String>,
    index: HashMap<String, usize>,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    weights: Vec<F>,
    degrees: Vec<u32>,
    flavor: GraphFlavor,
}

impl<F: Scalar> HashtagGraph<F> {
    fn from_pairs(
        hashtags: Vec<String>,
        pairs: HashMap<u64, u64>,
        weight_of: impl Fn(u32, u32, u64) -> F,
        flavor: GraphFlavor,
    ) -> Self {
        let m = hashtags.len();
        // Mirror each undirected pair into both rows.
        let mut edges: Vec<(u32, u32, F)> = Vec::with_capacity(pairs.len() * 2);
        for (key, num) in pairs {
            let i = (key >> 32) as u32;
            let j = (key & 0xffff_ffff) as u32;
            let w = weight_of(i, j, num);
            if w > F::zero() {
                edges.push((i, j, w));
                edges.push((j, i, w));
            }
        }
        edges.sort_unstable_by_key(|&(i, j, _)| ((i as u64) << 32) | j as u64);

        let mut row_offsets = Vec::with_capacity(m + 1);
        let mut col_indices = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        row_offsets.push(0);
        let mut row = 0usize;
        for (i, j, w) in edges {
            while row < i as usize {
                row_offsets.push(col_indices.len());
                row += 1;
            }
            col_indices.push(j);
            weights.push(w);
        }
        while row < m {
            row_offsets.push(col_indices.len());
            row += 1;
        }
        let degrees = (0..m)
            .map(|i| (row_offsets[i + 1] - row_offsets[i]) as u32)
            .collect();

        let index = hashtags
            .iter()
            .enumerate()
            .map(|(i, h)| (h.clone(), i))
            .collect();

        Self {
            hashtags,
            index,
            row_offsets,
            col_indices,
            weights,
            degrees,
            flavor,
        }
    }

    pub fn node_count(&self) -> usize {
        self.hashtags.len()
    }

    pub fn hashtag_name(&self, i: usize) -> &str {
        &self.hashtags[i]
    }

    pub fn hashtag_names(&self) -> &[String] {
        &self.hashtags
    }

    pub fn index_of(&self, tag: &str) -> Option<usize> {
        self.index.get(tag).copied()
    }

    /// Number of non-zero off-diagonal entries in row `i`.
    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn flavor(&self) -> GraphFlavor {
        self.flavor
    }

    /// Neighbors of `i` as parallel slices of (column index, weight),
    /// sorted by column.
    pub fn row(&self, i: usize) -> (&[u32], &[F]) {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        (&self.col_indices[lo..hi], &self.weights[lo..hi])
    }

    /// Weight between `i` and `j`; zero when no edge is stored.
    pub fn weight(&self, i: usize, j: usize) -> F {
        let (cols, weights) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(pos) => weights[pos],
            Err(_) => F::zero(),
        }
    }

    /// Resolve every seed to its node index, failing with the seed name
    /// if any is absent from the graph.
    pub fn resolve_seeds(&self, seeds: &crate::ingest::SeedSet) -> Result<Vec<usize>> {
        seeds
            .seeds()
            .iter()
            .map(|s| {
                self.index_of(s)
                    .ok_or_else(|| Error::MissingSeed(s.clone()))
            })
            .collect()
    }

    /// Undirected edges with `i < j`, for dumps and inspection.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            let (cols, weights) = self.row(i);
            cols.iter()
                .zip(weights)
                .filter(move |(&j, _)| (j as usize) > i)
                .map(move |(&j, &w)| (i, j as usize, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.col_indices.len() / 2
    }
}

fn pair_key(i: u32, j: u32) -> u64 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    ((lo as u64) << 32) | hi as u64
}

/// Build the hashtag-sharing graph: for distinct hashtags `i`, `j`,
///
/// ```text
/// A_ij = sum_k min(R_ki, R_kj) / min(total_i, total_j)
/// ```
///
/// Pairs with no common user are stored implicitly (absent), the diagonal
/// is zero, and every stored weight lies in `(0, 1]`.
pub fn build_sharing_graph<F: Scalar>(matrix: &SharingMatrix) -> Result<HashtagGraph<F>> {
    if matrix.user_count() == 0 || matrix.hashtag_count() == 0 {
        return Err(Error::EmptyCorpus);
    }

    // Numerators accumulate exactly in u64, so the merge order cannot
    // change the result regardless of thread count.
    let users: Vec<usize> = (0..matrix.user_count()).collect();
    let pairs: HashMap<u64, u64> = users
        .par_chunks(1024)
        .map(|chunk| {
            let mut local: HashMap<u64, u64> = HashMap::new();
            for &k in chunk {
                let (cols, counts) = matrix.user_row(k);
                for a in 0..cols.len() {
                    for b in (a + 1)..cols.len() {
                        let shared = counts[a].min(counts[b]) as u64;
                        *local.entry(pair_key(cols[a], cols[b])).or_insert(0) += shared;
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, |mut acc, local| {
            for (key, num) in local {
                *acc.entry(key).or_insert(0) += num;
            }
            acc
        });

    let totals = matrix.hashtag_totals();
    Ok(HashtagGraph::from_pairs(
        matrix.hashtag_names().to_vec(),
        pairs,
        |i, j, num| {
            let denom = totals[i as usize].min(totals[j as usize]);
            F::from_count(num) / F::from_count(denom)
        },
        GraphFlavor::Sharing,
    ))
}

/// Build the hashtag co-occurrence graph over the hashtag universe of
/// `matrix`: `A_ij` counts the posts containing both hashtags, ignoring
/// within-post multiplicity. Hashtags absent from the universe (for
/// example, removed by engagement filtering) are skipped.
pub fn build_cooccurrence_graph<F: Scalar>(
    records: &[PostRecord],
    matrix: &SharingMatrix,
) -> Result<HashtagGraph<F>> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let pairs: HashMap<u64, u64> = records
        .par_chunks(4096)
        .map(|chunk| {
            let mut local: HashMap<u64, u64> = HashMap::new();
            let mut present: Vec<u32> = Vec::new();
            for record in chunk {
                present.clear();
                present.extend(
                    record
                        .hashtags
                        .iter()
                        .filter_map(|t| matrix.hashtag_id(t))
                        .map(|i| i as u32),
                );
                present.sort_unstable();
                present.dedup();
                for a in 0..present.len() {
                    for b in (a + 1)..present.len() {
                        *local.entry(pair_key(present[a], present[b])).or_insert(0) += 1;
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, |mut acc, local| {
            for (key, num) in local {
                *acc.entry(key).or_insert(0) += num;
            }
            acc
        });

    Ok(HashtagGraph::from_pairs(
        matrix.hashtag_names().to_vec(),
        pairs,
        |_, _, num| F::from_count(num),
        GraphFlavor::Cooccurrence,
    ))
}
