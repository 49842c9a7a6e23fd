//! One-call classification pipeline: aggregate, filter, build the graph,
//! classify with the chosen method.

use serde::{Deserialize, Serialize};

use crate::baselines::{self, BaselineConfig};
use crate::classify::{classify_hashtags, classify_users, IntensityOrientation, StanceAssignments};
use crate::error::{Error, Result};
use crate::graph::{build_sharing_graph, HashtagGraph};
use crate::ingest::{PostRecord, SeedSet, SharingMatrix};
use crate::walk::{all_similarities, SimilarityScores, WalkConfig};
use crate::Scalar;

/// Classification method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// The entropy-dampened seeded walk on the hashtag-sharing graph.
    Lrm,
    /// Plain random walk on the co-occurrence graph.
    Srm,
    /// Cosine similarity to seed sharing columns.
    Hsm,
    /// Label propagation on the co-occurrence graph.
    Lpm,
    /// Uniformly random assignment.
    Rdm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Lrm,
        Method::Srm,
        Method::Hsm,
        Method::Lpm,
        Method::Rdm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Lrm => "lrm",
            Method::Srm => "srm",
            Method::Hsm => "hsm",
            Method::Lpm => "lpm",
            Method::Rdm => "rdm",
        }
    }

    /// Whether the method needs post-level records (co-occurrence graphs
    /// cannot be built from pre-aggregated counts).
    pub fn needs_records(&self) -> bool {
        matches!(self, Method::Srm | Method::Lpm)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lrm" => Ok(Method::Lrm),
            "srm" => Ok(Method::Srm),
            "hsm" => Ok(Method::Hsm),
            "lpm" => Ok(Method::Lpm),
            "rdm" => Ok(Method::Rdm),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a run consumes: post-level records, or counts that were
/// pre-aggregated upstream (which rules out co-occurrence methods).
#[derive(Debug, Clone)]
pub enum CorpusInput {
    Posts(Vec<PostRecord>),
    Aggregated(SharingMatrix),
}

/// Every knob of a classification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub method: Method,
    pub walk: WalkConfig,
    pub orientation: IntensityOrientation,
    /// Count a hashtag once per post instead of per occurrence.
    pub dedup_within_post: bool,
    pub baseline: BaselineConfig,
    /// Count unclassified entities in composition denominators.
    pub include_unclassified: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::Lrm,
            walk: WalkConfig::default(),
            orientation: IntensityOrientation::default(),
            dedup_within_post: false,
            baseline: BaselineConfig::default(),
            include_unclassified: false,
        }
    }
}

/// Everything a run produces: the filtered matrix the assignments are
/// indexed by, the assignments, and (for the walk method) the graph and
/// similarity matrix for dumps.
#[derive(Debug)]
pub struct PipelineRun<F: Scalar = f64> {
    pub matrix: SharingMatrix,
    pub assignments: StanceAssignments<F>,
    pub graph: Option<HashtagGraph<F>>,
    pub similarities: Option<SimilarityScores<F>>,
    pub warnings: Vec<String>,
}

/// Run the classification pipeline: aggregate (when given records),
/// filter low-engagement entities, then classify with the configured
/// method.
pub fn run<F: Scalar>(
    input: &CorpusInput,
    seeds: &SeedSet,
    config: &PipelineConfig,
) -> Result<PipelineRun<F>> {
    let full = match input {
        CorpusInput::Posts(records) => SharingMatrix::aggregate(records, config.dedup_within_post)?,
        CorpusInput::Aggregated(matrix) => matrix.clone(),
    };
    let matrix = full.filter_low_engagement(seeds)?;

    let records = match input {
        CorpusInput::Posts(records) => Some(records.as_slice()),
        CorpusInput::Aggregated(_) => None,
    };
    if config.method.needs_records() && records.is_none() {
        return Err(Error::UnsupportedInput(format!(
            "method {} needs post-level records, not pre-aggregated counts",
            config.method
        )));
    }

    let mut warnings = Vec::new();
    let (assignments, graph, similarities) = match config.method {
        Method::Lrm => {
            let graph = build_sharing_graph::<F>(&matrix)?;
            let similarities = all_similarities(&graph, seeds, &config.walk)?;
            let hashtags = classify_hashtags(&similarities, config.orientation);
            let users = classify_users(&matrix, &hashtags, seeds.class_count());
            (
                StanceAssignments { hashtags, users },
                Some(graph),
                Some(similarities),
            )
        }
        Method::Srm => {
            let assignments = baselines::srm_classify(
                records.expect("checked above"),
                &matrix,
                seeds,
                &config.baseline,
            )?;
            (assignments, None, None)
        }
        Method::Hsm => {
            let assignments = baselines::hsm_classify(&matrix, seeds)?;
            (assignments, None, None)
        }
        Method::Lpm => {
            let outcome = baselines::lpm_classify(
                records.expect("checked above"),
                &matrix,
                seeds,
                &config.baseline,
            )?;
            if !outcome.converged {
                warnings.push(format!(
                    "label propagation stopped after {} iterations without reaching tolerance",
                    outcome.iterations
                ));
            }
            (outcome.assignments, None, None)
        }
        Method::Rdm => {
            // Seeds exist only to fix the class count; they are still
            // exempted from filtering above so runs stay comparable.
            let assignments =
                baselines::rdm_classify(&matrix, seeds.class_count(), config.baseline.rng_seed);
            (assignments, None, None)
        }
    };

    Ok(PipelineRun {
        matrix,
        assignments,
        graph,
        similarities,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(user: &str, tags: &[&str]) -> PostRecord {
        PostRecord {
            user: user.to_string(),
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
            timestamp: None,
        }
    }

    fn seed_set(tags: &[&str]) -> SeedSet {
        SeedSet::new(tags.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    fn two_camp_records() -> Vec<PostRecord> {
        let mut records = Vec::new();
        for k in 0..4 {
            records.push(rec(&format!("left{k}"), &["s1", "alpha"]));
            records.push(rec(&format!("left{k}"), &["alpha", "s1"]));
            records.push(rec(&format!("right{k}"), &["s2", "beta"]));
            records.push(rec(&format!("right{k}"), &["beta", "s2"]));
        }
        records
    }

    #[test]
    fn lrm_pipeline_classifies_a_two_camp_corpus() {
        let records = two_camp_records();
        let seeds = seed_set(&["s1", "s2"]);
        let out: PipelineRun = run(
            &CorpusInput::Posts(records),
            &seeds,
            &PipelineConfig::default(),
        )
        .unwrap();
        let alpha = out.matrix.hashtag_id("alpha").unwrap();
        let beta = out.matrix.hashtag_id("beta").unwrap();
        assert_eq!(out.assignments.hashtags[alpha].class, Some(0));
        assert_eq!(out.assignments.hashtags[beta].class, Some(1));
        let left = out.matrix.user_id("left0").unwrap();
        let right = out.matrix.user_id("right0").unwrap();
        assert_eq!(out.assignments.users[left].class, Some(0));
        assert_eq!(out.assignments.users[right].class, Some(1));
        assert!(out.graph.is_some());
        assert!(out.similarities.is_some());
    }

    #[test]
    fn record_methods_reject_aggregated_input() {
        let matrix = SharingMatrix::from_triples(
            [
                ("u1", "s1", 3u64),
                ("u1", "a", 3),
                ("u2", "s2", 3),
                ("u2", "b", 3),
            ]
            .into_iter()
            .map(|(u, h, c)| (u.to_string(), h.to_string(), c)),
        )
        .unwrap();
        let seeds = seed_set(&["s1", "s2"]);
        for method in [Method::Srm, Method::Lpm] {
            let config = PipelineConfig {
                method,
                ..PipelineConfig::default()
            };
            let err =
                run::<f64>(&CorpusInput::Aggregated(matrix.clone()), &seeds, &config).unwrap_err();
            assert!(matches!(err, Error::UnsupportedInput(_)));
        }
    }

    #[test]
    fn missing_seed_fails_with_its_name() {
        let records = two_camp_records();
        let seeds = seed_set(&["s1", "nowhere"]);
        let err = run::<f64>(
            &CorpusInput::Posts(records),
            &seeds,
            &PipelineConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::MissingSeed(name) => assert_eq!(name, "nowhere"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn every_method_runs_on_post_records() {
        let records = two_camp_records();
        let seeds = seed_set(&["s1", "s2"]);
        for method in Method::ALL {
            let config = PipelineConfig {
                method,
                ..PipelineConfig::default()
            };
            let out = run::<f64>(&CorpusInput::Posts(records.clone()), &seeds, &config)
                .unwrap_or_else(|e| panic!("{method} failed: {e}"));
            assert_eq!(out.assignments.users.len(), out.matrix.user_count());
            assert_eq!(out.assignments.hashtags.len(), out.matrix.hashtag_count());
        }
    }

    #[test]
    fn f32_pipeline_agrees_with_f64_on_classes() {
        let records = two_camp_records();
        let seeds = seed_set(&["s1", "s2"]);
        let config = PipelineConfig::default();
        let wide = run::<f64>(&CorpusInput::Posts(records.clone()), &seeds, &config).unwrap();
        let narrow = run::<f32>(&CorpusInput::Posts(records), &seeds, &config).unwrap();
        for (a, b) in wide
            .assignments
            .hashtags
            .iter()
            .zip(&narrow.assignments.hashtags)
        {
            assert_eq!(a.class, b.class);
            if let (Some(x), Some(y)) = (a.intensity, b.intensity) {
                assert!((x - y as f64).abs() < 1e-5);
            }
        }
        for (a, b) in wide.assignments.users.iter().zip(&narrow.assignments.users) {
            assert_eq!(a.class, b.class);
        }
    }

    #[test]
    fn method_strings_round_trip() {
        for method in Method::ALL {
            let parsed: Method = method.as_str().parse().unwrap();
            assert_eq!(parsed, method);
        }
        assert!("icm".parse::<Method>().is_err());
    }
}
