//! Assignment of hashtags to stance classes with intensities, and of users
//! to classes by intensity-weighted inclination.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::SharingMatrix;
use crate::walk::{normalized_entropy, SimilarityScores};
use crate::Scalar;

/// How a hashtag's intensity is read off its similarity distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntensityOrientation {
    /// `1 - normalized entropy`: mass concentrated on one class scores 1,
    /// an even spread scores 0. This is the default; partisan hashtags
    /// carry large weight in user inclination.
    #[default]
    Concentration,
    /// The normalized entropy itself, the literal reading. Kept behind
    /// this switch for comparison.
    Entropy,
}

/// Argmax tie state of an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieFlag {
    None,
    /// The similarity distribution is within 5% of uniform (normalized
    /// entropy at least [`NEAR_TIE_ENTROPY`]); the argmax is barely
    /// meaningful.
    Near,
    /// Two or more classes share the exact maximum; the lowest class
    /// index was chosen.
    Exact,
}

impl TieFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            TieFlag::None => "none",
            TieFlag::Near => "near",
            TieFlag::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(TieFlag::None),
            "near" => Some(TieFlag::Near),
            "exact" => Some(TieFlag::Exact),
            _ => None,
        }
    }
}

/// Normalized-entropy level at or above which an assignment is flagged as
/// a near tie.
pub const NEAR_TIE_ENTROPY: f64 = 0.95;

/// Per-hashtag stance assignment. `class` is `None` for hashtags with no
/// similarity to any seed; `intensity` is present only for classified
/// hashtags of methods that define one.
#[derive(Debug, Clone, PartialEq)]
pub struct HashtagAssignment<F: Scalar = f64> {
    pub class: Option<usize>,
    pub intensity: Option<F>,
    pub tie: TieFlag,
}

impl<F: Scalar> HashtagAssignment<F> {
    pub fn unclassified() -> Self {
        Self {
            class: None,
            intensity: None,
            tie: TieFlag::None,
        }
    }
}

/// Per-user stance assignment with the full inclination vector (all zero
/// exactly when the user is unclassified).
#[derive(Debug, Clone, PartialEq)]
pub struct UserAssignment<F: Scalar = f64> {
    pub class: Option<usize>,
    pub inclination: Vec<F>,
    pub tie: TieFlag,
}

/// Hashtag and user assignments over one sharing matrix, aligned with its
/// indices.
#[derive(Debug, Clone, PartialEq)]
pub struct StanceAssignments<F: Scalar = f64> {
    pub hashtags: Vec<HashtagAssignment<F>>,
    pub users: Vec<UserAssignment<F>>,
}

/// Argmax with lowest-index tie breaking over non-negative values.
/// Returns `None` when every value is zero, otherwise the winning index
/// and whether the maximum was shared exactly.
pub fn argmax_class<F: Scalar>(values: &[F]) -> Option<(usize, bool)> {
    let mut best: Option<usize> = None;
    let mut tied = false;
    for (c, &v) in values.iter().enumerate() {
        match best {
            None if v > F::zero() => best = Some(c),
            Some(b) => {
                if v > values[b] {
                    best = Some(c);
                    tied = false;
                } else if v == values[b] {
                    tied = true;
                }
            }
            _ => {}
        }
    }
    best.map(|b| (b, tied))
}

/// Classify every hashtag by its largest seed similarity and attach the
/// stance intensity derived from the similarity distribution. Hashtags
/// with all-zero similarities come back unclassified.
pub fn classify_hashtags<F: Scalar>(
    scores: &SimilarityScores<F>,
    orientation: IntensityOrientation,
) -> Vec<HashtagAssignment<F>> {
    let near_tie = F::from_f64(NEAR_TIE_ENTROPY).expect("threshold fits scalar");
    (0..scores.hashtag_count())
        .map(|i| {
            let column = scores.column(i);
            match argmax_class(&column) {
                None => HashtagAssignment::unclassified(),
                Some((class, exact_tie)) => {
                    let spread = normalized_entropy(&column);
                    let intensity = match orientation {
                        IntensityOrientation::Concentration => F::one() - spread,
                        IntensityOrientation::Entropy => spread,
                    };
                    let tie = if exact_tie {
                        TieFlag::Exact
                    } else if spread >= near_tie {
                        TieFlag::Near
                    } else {
                        TieFlag::None
                    };
                    HashtagAssignment {
                        class: Some(class),
                        intensity: Some(intensity.max(F::zero()).min(F::one())),
                        tie,
                    }
                }
            }
        })
        .collect()
}

/// Classify every user by intensity-weighted inclination: the inclination
/// of user `k` toward class `c` sums `intensity * count / user_total` over
/// the class-`c` hashtags the user shared. Users whose shares all fall on
/// unclassified hashtags come back unclassified.
pub fn classify_users<F: Scalar>(
    matrix: &SharingMatrix,
    hashtags: &[HashtagAssignment<F>],
    class_count: usize,
) -> Vec<UserAssignment<F>> {
    (0..matrix.user_count())
        .into_par_iter()
        .map(|k| {
            let total = matrix.user_total(k);
            debug_assert!(total > 0, "stored users always have shares");
            let total = F::from_count(total);
            let mut inclination = vec![F::zero(); class_count];
            let (cols, counts) = matrix.user_row(k);
            for (&i, &count) in cols.iter().zip(counts) {
                let assignment = &hashtags[i as usize];
                if let (Some(class), Some(intensity)) = (assignment.class, assignment.intensity) {
                    inclination[class] += intensity * F::from_count(count as u64) / total;
                }
            }
            match argmax_class(&inclination) {
                None => UserAssignment {
                    class: None,
                    inclination,
                    tie: TieFlag::None,
                },
                Some((class, exact_tie)) => UserAssignment {
                    class: Some(class),
                    inclination,
                    tie: if exact_tie {
                        TieFlag::Exact
                    } else {
                        TieFlag::None
                    },
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SharingMatrix;
    use crate::walk::SimilarityScores;
    use proptest::prelude::*;

    fn scores(rows: Vec<Vec<f64>>) -> SimilarityScores<f64> {
        SimilarityScores::from_rows(rows)
    }

    #[test]
    fn concentrated_similarity_has_intensity_one() {
        let s = scores(vec![vec![0.7], vec![0.0]]);
        let out = classify_hashtags(&s, IntensityOrientation::Concentration);
        assert_eq!(out[0].class, Some(0));
        assert!((out[0].intensity.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(out[0].tie, TieFlag::None);
    }

    #[test]
    fn uniform_similarity_ties_with_intensity_zero() {
        let s = scores(vec![vec![0.4], vec![0.4]]);
        let out = classify_hashtags(&s, IntensityOrientation::Concentration);
        assert_eq!(out[0].class, Some(0), "ties break to the lowest index");
        assert!(out[0].intensity.unwrap().abs() < 1e-12);
        assert_eq!(out[0].tie, TieFlag::Exact);
    }

    #[test]
    fn skewed_similarity_matches_entropy_oracle() {
        // (0.3, 0.1): intensity = 1 - 0.8113.
        let s = scores(vec![vec![0.3], vec![0.1]]);
        let out = classify_hashtags(&s, IntensityOrientation::Concentration);
        assert_eq!(out[0].class, Some(0));
        assert!((out[0].intensity.unwrap() - (1.0 - 0.8113)).abs() < 1e-4);
        assert_eq!(out[0].tie, TieFlag::None);

        let literal = classify_hashtags(&s, IntensityOrientation::Entropy);
        assert!((literal[0].intensity.unwrap() - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn zero_similarity_is_unclassified() {
        let s = scores(vec![vec![0.0], vec![0.0]]);
        let out = classify_hashtags(&s, IntensityOrientation::Concentration);
        assert_eq!(out[0], HashtagAssignment::unclassified());
    }

    #[test]
    fn almost_uniform_similarity_is_flagged_near() {
        let s = scores(vec![vec![0.51], vec![0.49]]);
        let out = classify_hashtags(&s, IntensityOrientation::Concentration);
        assert_eq!(out[0].class, Some(0));
        assert_eq!(out[0].tie, TieFlag::Near);
    }

    fn matrix(triples: &[(&str, &str, u64)]) -> SharingMatrix {
        SharingMatrix::from_triples(
            triples
                .iter()
                .map(|(u, h, c)| (u.to_string(), h.to_string(), *c)),
        )
        .unwrap()
    }

    fn classified(class: usize, intensity: f64) -> HashtagAssignment<f64> {
        HashtagAssignment {
            class: Some(class),
            intensity: Some(intensity),
            tie: TieFlag::None,
        }
    }

    #[test]
    fn user_sharing_one_full_intensity_class_gets_inclination_one() {
        let m = matrix(&[("u1", "a", 2), ("u1", "b", 2)]);
        let assignments = vec![classified(0, 1.0), classified(0, 1.0)];
        let users = classify_users(&m, &assignments, 2);
        assert_eq!(users[0].class, Some(0));
        assert!((users[0].inclination[0] - 1.0).abs() < 1e-12);
        assert_eq!(users[0].inclination[1], 0.0);
    }

    #[test]
    fn user_sharing_only_unclassified_hashtags_is_unclassified() {
        let m = matrix(&[("u1", "a", 3)]);
        let assignments: Vec<HashtagAssignment<f64>> = vec![HashtagAssignment::unclassified()];
        let users = classify_users(&m, &assignments, 2);
        assert_eq!(users[0].class, None);
        assert!(users[0].inclination.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn inclination_matches_hand_computation() {
        // Total 4 shares: 3 of a class-0 hashtag at intensity 0.8 and 1 of
        // a class-1 hashtag at intensity 0.5 -> (0.6, 0.125).
        let m = matrix(&[("u1", "a", 3), ("u1", "b", 1)]);
        let assignments = vec![classified(0, 0.8), classified(1, 0.5)];
        let users = classify_users(&m, &assignments, 2);
        assert!((users[0].inclination[0] - 0.6).abs() < 1e-12);
        assert!((users[0].inclination[1] - 0.125).abs() < 1e-12);
        assert_eq!(users[0].class, Some(0));
    }

    proptest! {
        #[test]
        fn inclination_stays_in_unit_interval(
            cells in proptest::collection::vec((0usize..4, 0usize..6, 1u64..5), 1..25),
            classes in proptest::collection::vec(0usize..3, 6),
            intensities in proptest::collection::vec(0.0f64..=1.0, 6),
        ) {
            let m = SharingMatrix::from_triples(cells.iter().map(|(u, h, c)| {
                (format!("u{u}"), format!("h{h}"), *c)
            })).unwrap();
            let assignments: Vec<HashtagAssignment<f64>> = (0..m.hashtag_count())
                .map(|i| classified(classes[i % 6], intensities[i % 6]))
                .collect();
            let users = classify_users(&m, &assignments, 3);
            for user in &users {
                for &l in &user.inclination {
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&l));
                }
            }
        }

        #[test]
        fn hashtag_class_and_intensity_are_scale_invariant(
            column in proptest::collection::vec(0.0f64..=1.0, 2..4),
            scale in 0.01f64..100.0,
        ) {
            let rows: Vec<Vec<f64>> = column.iter().map(|&v| vec![v]).collect();
            let scaled: Vec<Vec<f64>> = column.iter().map(|&v| vec![v * scale]).collect();
            let a = classify_hashtags(&scores(rows), IntensityOrientation::Concentration);
            let b = classify_hashtags(&scores(scaled), IntensityOrientation::Concentration);
            prop_assert_eq!(a[0].class, b[0].class);
            match (a[0].intensity, b[0].intensity) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-9),
                (None, None) => {}
                _ => prop_assert!(false, "classification state changed under scaling"),
            }
        }

        #[test]
        fn class_counts_partition_hashtags(
            columns in proptest::collection::vec(
                proptest::collection::vec(0.0f64..=1.0, 3),
                1..12,
            ),
        ) {
            let t = 3;
            let rows: Vec<Vec<f64>> = (0..t)
                .map(|c| columns.iter().map(|col| col[c]).collect())
                .collect();
            let out = classify_hashtags(&scores(rows), IntensityOrientation::Concentration);
            let classified = out.iter().filter(|a| a.class.is_some()).count();
            let unclassified = out.iter().filter(|a| a.class.is_none()).count();
            prop_assert_eq!(classified + unclassified, columns.len());
        }
    }

    #[test]
    fn more_shares_of_a_positive_intensity_hashtag_never_lower_inclination() {
        let assignments = vec![classified(0, 0.8), classified(1, 0.5)];
        let mut last = -1.0f64;
        for count in 1..8u64 {
            let m = matrix(&[("u1", "a", count), ("u1", "b", 1)]);
            let users = classify_users(&m, &assignments, 2);
            let l = users[0].inclination[0];
            assert!(l >= last - 1e-12);
            last = l;
        }
    }
}
