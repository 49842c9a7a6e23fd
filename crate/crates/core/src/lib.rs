//! Stance classification of social-media users and keywords from
//! hashtag-sharing counts.
//!
//! Given a corpus of posts (user, hashtag list, optional timestamp) and one
//! seed hashtag per stance class, the toolkit projects the user-by-hashtag
//! sharing counts onto a weighted hashtag graph, runs an entropy-dampened
//! random walk from each seed, and assigns every hashtag and user to the
//! stance class it is most similar to. Baseline classifiers, a macro-F1
//! evaluation harness, a planted-partition corpus generator, and windowed
//! temporal runs round out the pipeline.
//!
//! The numeric kernels are generic over the floating-point scalar via
//! [`Scalar`] (`f32` or `f64`); the concrete aliases at the crate root pick
//! `f64`, which is also the default type parameter everywhere.

pub mod baselines;
pub mod classify;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod synth;
pub mod tables;
pub mod testkit;
pub mod walk;

pub use error::{Error, Result};

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the numeric kernels are generic over.
///
/// Sharing counts stay integral end to end; everything derived from them
/// (edge weights, entropies, visit probabilities, intensities, F1 scores)
/// is computed in `F`. `f64` is the default and what the CLI uses; `f32`
/// halves graph memory on large corpora at the cost of precision.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an integral count.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }

    /// Lossy conversion from a collection size.
    fn from_len(len: usize) -> Self {
        Self::from_usize(len).expect("length representable as float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `f32` flavors of the core value types; the unparameterized names default
/// to `f64`.
pub type HashtagGraph32 = graph::HashtagGraph<f32>;
pub type SimilarityScores32 = walk::SimilarityScores<f32>;
pub type StanceAssignments32 = classify::StanceAssignments<f32>;
pub type EvalReport32 = eval::EvalReport<f32>;

/// `f64` aliases, matching the default type parameters.
pub type HashtagGraph64 = graph::HashtagGraph<f64>;
pub type SimilarityScores64 = walk::SimilarityScores<f64>;
pub type StanceAssignments64 = classify::StanceAssignments<f64>;
pub type EvalReport64 = eval::EvalReport<f64>;
