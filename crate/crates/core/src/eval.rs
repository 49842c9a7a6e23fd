//! Golden-set handling, per-class F1 / macro-F1 scoring, timing, and
//! windowed temporal-evolution runs.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classify::StanceAssignments;
use crate::error::{Error, Result};
use crate::ingest::{window, PostRecord, SeedSet};
use crate::pipeline::{run, CorpusInput, PipelineConfig};
use crate::Scalar;

/// Ground-truth users and hashtags per class, aligned with the seed
/// order. Used exclusively for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenSet {
    pub users: Vec<BTreeSet<String>>,
    pub hashtags: Vec<BTreeSet<String>>,
}

impl GoldenSet {
    /// Validate that classes are disjoint within each entity kind.
    pub fn new(users: Vec<BTreeSet<String>>, hashtags: Vec<BTreeSet<String>>) -> Result<Self> {
        if users.len() != hashtags.len() {
            return Err(Error::InvalidConfig(format!(
                "golden set has {} user classes but {} hashtag classes",
                users.len(),
                hashtags.len()
            )));
        }
        for (kind, sets) in [("user", &users), ("hashtag", &hashtags)] {
            let mut seen: BTreeSet<&String> = BTreeSet::new();
            for set in sets.iter() {
                for id in set {
                    if !seen.insert(id) {
                        return Err(Error::InvalidConfig(format!(
                            "golden {kind} {id:?} appears in more than one class"
                        )));
                    }
                }
            }
        }
        Ok(Self { users, hashtags })
    }

    pub fn class_count(&self) -> usize {
        self.users.len()
    }

    /// Drop golden entities that are absent from the evaluated matrix
    /// (for example, removed by engagement filtering), returning the
    /// restricted set and the names of everything dropped.
    pub fn restrict_to(&self, matrix: &crate::ingest::SharingMatrix) -> (GoldenSet, Vec<String>) {
        let mut dropped = Vec::new();
        let users = self
            .users
            .iter()
            .map(|set| {
                set.iter()
                    .filter(|id| {
                        let present = matrix.user_id(id).is_some();
                        if !present {
                            dropped.push(format!("user {id}"));
                        }
                        present
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        let hashtags = self
            .hashtags
            .iter()
            .map(|set| {
                set.iter()
                    .filter(|id| {
                        let present = matrix.hashtag_id(id).is_some();
                        if !present {
                            dropped.push(format!("hashtag {id}"));
                        }
                        present
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        (GoldenSet { users, hashtags }, dropped)
    }
}

/// Thresholds for deriving golden hashtags from golden-user share counts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GoldenDeriveConfig {
    /// Minimum total shares by the class's golden users.
    pub min_shares: u64,
    /// Minimum number of distinct golden users sharing the hashtag.
    pub min_distinct_users: usize,
    /// The class's golden-user share count must be at least this many
    /// times the count from every other class's golden users.
    pub dominance: u64,
}

impl Default for GoldenDeriveConfig {
    fn default() -> Self {
        Self {
            min_shares: 30,
            min_distinct_users: 2,
            dominance: 5,
        }
    }
}

/// Derive golden hashtags from golden users: a hashtag qualifies for a
/// class when that class's golden users shared it often enough, from
/// enough distinct accounts, and far more than any other class's golden
/// users did. Golden users absent from the matrix contribute nothing.
pub fn derive_golden_hashtags(
    matrix: &crate::ingest::SharingMatrix,
    golden_users: &[BTreeSet<String>],
    config: &GoldenDeriveConfig,
) -> Result<Vec<BTreeSet<String>>> {
    let t = golden_users.len();
    for (c, set) in golden_users.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::EmptyGoldenSet(format!(
                "no golden users for class {c}"
            )));
        }
    }

    // Per class: hashtag -> (total shares, distinct golden sharers).
    let mut stats: Vec<HashMap<usize, (u64, usize)>> = vec![HashMap::new(); t];
    for (c, set) in golden_users.iter().enumerate() {
        for name in set {
            let Some(k) = matrix.user_id(name) else {
                continue;
            };
            let (cols, counts) = matrix.user_row(k);
            for (&i, &count) in cols.iter().zip(counts) {
                let entry = stats[c].entry(i as usize).or_insert((0, 0));
                entry.0 += count as u64;
                entry.1 += 1;
            }
        }
    }

    let mut out = vec![BTreeSet::new(); t];
    for c in 0..t {
        for (&i, &(total, distinct)) in &stats[c] {
            if total < config.min_shares || distinct < config.min_distinct_users {
                continue;
            }
            let dominant = (0..t).filter(|&o| o != c).all(|o| {
                let other = stats[o].get(&i).map_or(0, |&(tot, _)| tot);
                total >= config.dominance * other
            });
            if dominant {
                out[c].insert(matrix.hashtag_name(i).to_string());
            }
        }
    }
    Ok(out)
}

/// Per-class F1 scores with their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F: Scalar = f64> {
    pub per_class_f1: Vec<F>,
    pub macro_f1: F,
    /// Golden entities per class.
    pub support: Vec<usize>,
    pub runtime_seconds: f64,
}

/// Score predictions against golden labels for one entity kind.
///
/// Only golden-labeled entities enter the counts; a golden entity that is
/// unclassified or missing from `predictions` counts against its class's
/// recall. Per-class F1 is the harmonic mean of precision and recall
/// (zero when both are zero) and the macro score is their unweighted
/// mean.
pub fn score<F: Scalar>(
    predictions: &HashMap<String, Option<usize>>,
    golden: &[BTreeSet<String>],
) -> Result<EvalReport<F>> {
    let t = golden.len();
    let total_golden: usize = golden.iter().map(BTreeSet::len).sum();
    if total_golden == 0 {
        return Err(Error::EmptyGoldenSet("no golden entities to score".into()));
    }

    let mut tp = vec![0usize; t];
    let mut fp = vec![0usize; t];
    for (c, set) in golden.iter().enumerate() {
        for id in set {
            match predictions.get(id).copied().flatten() {
                Some(pred) if pred == c => tp[c] += 1,
                Some(pred) if pred < t => fp[pred] += 1,
                _ => {}
            }
        }
    }

    let mut per_class_f1 = Vec::with_capacity(t);
    for c in 0..t {
        let support = golden[c].len();
        let precision = if tp[c] + fp[c] > 0 {
            F::from_len(tp[c]) / F::from_len(tp[c] + fp[c])
        } else {
            F::zero()
        };
        let recall = if support > 0 {
            F::from_len(tp[c]) / F::from_len(support)
        } else {
            F::zero()
        };
        let f1 = if precision + recall > F::zero() {
            F::from_len(2) * precision * recall / (precision + recall)
        } else {
            F::zero()
        };
        per_class_f1.push(f1);
    }
    let macro_f1 = per_class_f1.iter().fold(F::zero(), |acc, &f| acc + f) / F::from_len(t);

    Ok(EvalReport {
        per_class_f1,
        macro_f1,
        support: golden.iter().map(BTreeSet::len).collect(),
        runtime_seconds: 0.0,
    })
}

/// Prediction map for one entity kind pulled out of pipeline assignments.
pub fn prediction_maps<F: Scalar>(
    matrix: &crate::ingest::SharingMatrix,
    assignments: &StanceAssignments<F>,
) -> (
    HashMap<String, Option<usize>>,
    HashMap<String, Option<usize>>,
) {
    let users = (0..matrix.user_count())
        .map(|k| (matrix.user_name(k).to_string(), assignments.users[k].class))
        .collect();
    let hashtags = (0..matrix.hashtag_count())
        .map(|i| {
            (
                matrix.hashtag_name(i).to_string(),
                assignments.hashtags[i].class,
            )
        })
        .collect();
    (users, hashtags)
}

/// Per-class population shares of one classified corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition<F: Scalar = f64> {
    /// Percentages in `[0, 100]`, per class.
    pub user_pct: Vec<F>,
    pub hashtag_pct: Vec<F>,
    pub user_counts: Vec<usize>,
    pub hashtag_counts: Vec<usize>,
    pub unclassified_users: usize,
    pub unclassified_hashtags: usize,
}

/// Percentage breakdown of an assignment set. Unclassified entities are
/// excluded from the denominators unless `include_unclassified` is set.
pub fn composition<F: Scalar>(
    assignments: &StanceAssignments<F>,
    class_count: usize,
    include_unclassified: bool,
) -> Composition<F> {
    let mut user_counts = vec![0usize; class_count];
    let mut unclassified_users = 0usize;
    for user in &assignments.users {
        match user.class {
            Some(c) => user_counts[c] += 1,
            None => unclassified_users += 1,
        }
    }
    let mut hashtag_counts = vec![0usize; class_count];
    let mut unclassified_hashtags = 0usize;
    for hashtag in &assignments.hashtags {
        match hashtag.class {
            Some(c) => hashtag_counts[c] += 1,
            None => unclassified_hashtags += 1,
        }
    }

    let pct = |counts: &[usize], unclassified: usize| -> Vec<F> {
        let classified: usize = counts.iter().sum();
        let denom = if include_unclassified {
            classified + unclassified
        } else {
            classified
        };
        counts
            .iter()
            .map(|&c| {
                if denom == 0 {
                    F::zero()
                } else {
                    F::from_len(c) / F::from_len(denom) * F::from_len(100)
                }
            })
            .collect()
    };

    Composition {
        user_pct: pct(&user_counts, unclassified_users),
        hashtag_pct: pct(&hashtag_counts, unclassified_hashtags),
        user_counts,
        hashtag_counts,
        unclassified_users,
        unclassified_hashtags,
    }
}

/// One window of a temporal-evolution run.
#[derive(Debug, Clone)]
pub struct WindowReport<F: Scalar = f64> {
    pub window: i64,
    pub outcome: WindowOutcome<F>,
}

#[derive(Debug, Clone)]
pub enum WindowOutcome<F: Scalar = f64> {
    /// The window could not be classified (for example, a seed is missing
    /// from it); carries the reason.
    Skipped {
        reason: String,
    },
    Classified(Composition<F>),
}

/// Run the full pipeline per time window and report each window's class
/// composition. Windows missing a seed (or emptied by filtering) are
/// skipped with a reason instead of failing the whole run.
pub fn evolve<F: Scalar>(
    records: &[PostRecord],
    seeds: &SeedSet,
    window_length_secs: u64,
    origin: i64,
    config: &PipelineConfig,
) -> Result<Vec<WindowReport<F>>> {
    let windows = window(records, window_length_secs, origin)?;
    let mut reports = Vec::with_capacity(windows.len());
    for (w, window_records) in windows {
        let input = CorpusInput::Posts(window_records);
        let outcome = match run::<F>(&input, seeds, config) {
            Ok(outcome) => WindowOutcome::Classified(composition(
                &outcome.assignments,
                seeds.class_count(),
                config.include_unclassified,
            )),
            Err(
                err @ (Error::MissingSeed(_) | Error::EmptyAfterFilter { .. } | Error::EmptyCorpus),
            ) => WindowOutcome::Skipped {
                reason: err.to_string(),
            },
            Err(err) => return Err(err),
        };
        reports.push(WindowReport { window: w, outcome });
    }
    Ok(reports)
}

/// Wall-clock mean over `repeats` sequential executions of `run`,
/// returning the mean seconds and the last result.
pub fn time_run<T>(repeats: usize, mut run: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    if repeats == 0 {
        return Err(Error::InvalidConfig(
            "repeat count must be at least 1".into(),
        ));
    }
    let mut total = 0.0;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let value = run()?;
        total += start.elapsed().as_secs_f64();
        last = Some(value);
    }
    Ok((total / repeats as f64, last.expect("at least one run")))
}
