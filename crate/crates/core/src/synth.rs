//! Planted-partition corpus generator: reproducible synthetic post
//! streams with known class membership, used for acceptance testing and
//! baseline comparison.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::GoldenSet;
use crate::ingest::{PostRecord, SeedSet};

/// Generator parameters. Every corpus is fully determined by its config,
/// including `rng_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of planted classes `t`.
    pub classes: usize,
    pub users_per_class: usize,
    /// Class pool size, counting the class seed.
    pub hashtags_per_class: usize,
    /// General hashtags reached only through cross-class leakage.
    pub shared_general_hashtags: usize,
    /// Rarely-used noise hashtags, also reached only through leakage.
    /// They form the low-engagement tail that keeps the mean share count
    /// below the planted bulk, the shape engagement filtering assumes.
    pub background_hashtags: usize,
    /// Probability that a tag slot draws from the author's own class
    /// pool; the remainder spreads uniformly over the general pool, the
    /// background pool, and the other classes' pools. Must exceed `1/t`.
    pub in_class_share_prob: f64,
    pub posts_per_user: usize,
    /// Tag slots per post.
    pub tags_per_post: usize,
    /// Probability that an in-class draw picks the class seed, making
    /// seeds dominant but not exclusive.
    pub seed_share: f64,
    /// Per-class multiplier on `posts_per_user` (all 1.0 when absent).
    pub activity_skew: Option<Vec<f64>>,
    /// Per-user activity spread: each user's post count is scaled by a
    /// uniform draw from `[1 - jitter, 1 + jitter]`. Zero pins every
    /// user of a class to the same count.
    pub activity_jitter: f64,
    /// High-traffic hub hashtags shared symmetrically by every class via
    /// dedicated single-tag posts.
    pub hub_hashtags: usize,
    pub hub_posts_per_user: usize,
    /// Timestamps are drawn uniformly from `[ts_origin, ts_origin +
    /// ts_span)`; a zero span stamps everything with the origin.
    pub ts_origin: i64,
    pub ts_span: u64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: 2,
            users_per_class: 100,
            hashtags_per_class: 20,
            shared_general_hashtags: 5,
            background_hashtags: 40,
            in_class_share_prob: 0.8,
            posts_per_user: 20,
            tags_per_post: 3,
            seed_share: 0.2,
            activity_skew: None,
            activity_jitter: 0.0,
            hub_hashtags: 0,
            hub_posts_per_user: 0,
            ts_origin: 0,
            ts_span: 0,
            rng_seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::InvalidConfig("need at least 2 classes".into()));
        }
        for (name, value) in [
            ("users_per_class", self.users_per_class),
            ("hashtags_per_class", self.hashtags_per_class),
            ("posts_per_user", self.posts_per_user),
            ("tags_per_post", self.tags_per_post),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        let eps = self.in_class_share_prob;
        if eps <= 1.0 / self.classes as f64 || eps > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "in_class_share_prob {eps} must lie in (1/{}, 1]",
                self.classes
            )));
        }
        if !(0.0..1.0).contains(&self.seed_share) {
            return Err(Error::InvalidConfig("seed_share must lie in [0, 1)".into()));
        }
        if !(0.0..1.0).contains(&self.activity_jitter) {
            return Err(Error::InvalidConfig(
                "activity_jitter must lie in [0, 1)".into(),
            ));
        }
        if let Some(skew) = &self.activity_skew {
            if skew.len() != self.classes {
                return Err(Error::InvalidConfig(format!(
                    "activity_skew has {} entries for {} classes",
                    skew.len(),
                    self.classes
                )));
            }
            if skew.iter().any(|&s| s <= 0.0) {
                return Err(Error::InvalidConfig(
                    "activity_skew entries must be positive".into(),
                ));
            }
        }
        if self.hub_posts_per_user > 0 && self.hub_hashtags == 0 {
            return Err(Error::InvalidConfig(
                "hub_posts_per_user set but hub_hashtags is 0".into(),
            ));
        }
        Ok(())
    }

    fn posts_for_user(&self, c: usize, jitter_draw: f64) -> usize {
        let skew = self.activity_skew.as_ref().map_or(1.0, |skew| skew[c]);
        let jitter = 1.0 - self.activity_jitter + 2.0 * self.activity_jitter * jitter_draw;
        ((self.posts_per_user as f64) * skew * jitter)
            .round()
            .max(1.0) as usize
    }
}

/// A generated corpus: the post stream, the planted assignment as golden
/// truth, and the planted seeds.
pub struct SynthOutput {
    pub records: Vec<PostRecord>,
    pub golden: GoldenSet,
    pub seeds: SeedSet,
}

fn seed_tag(c: usize) -> String {
    format!("seed{c}")
}

fn class_tag(c: usize, j: usize) -> String {
    format!("c{c}h{j}")
}

/// Generate a corpus. Class sizes are exact; all randomness flows from
/// `rng_seed` through a single stream, so equal configs give
/// byte-identical corpora.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let t = config.classes;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    // Class pools: index 0 is the seed.
    let pools: Vec<Vec<String>> = (0..t)
        .map(|c| {
            let mut pool = vec![seed_tag(c)];
            pool.extend((1..config.hashtags_per_class).map(|j| class_tag(c, j)));
            pool
        })
        .collect();
    let generals: Vec<String> = (0..config.shared_general_hashtags)
        .map(|g| format!("gen{g}"))
        .collect();
    let background: Vec<String> = (0..config.background_hashtags)
        .map(|b| format!("bg{b}"))
        .collect();
    let hubs: Vec<String> = (0..config.hub_hashtags)
        .map(|x| format!("hub{x}"))
        .collect();

    // Leakage targets per class: the general and background pools plus
    // every other class's pool.
    let leak_pools: Vec<Vec<&String>> = (0..t)
        .map(|c| {
            let mut leak: Vec<&String> = generals.iter().collect();
            leak.extend(background.iter());
            for (o, pool) in pools.iter().enumerate() {
                if o != c {
                    leak.extend(pool.iter());
                }
            }
            leak
        })
        .collect();

    let mut records = Vec::new();
    for c in 0..t {
        for k in 0..config.users_per_class {
            let user = format!("u{c}x{k}");
            let posts = config.posts_for_user(c, rng.gen::<f64>());
            for _ in 0..posts {
                let mut tags = Vec::with_capacity(config.tags_per_post);
                for _ in 0..config.tags_per_post {
                    let tag = if rng.gen::<f64>() < config.in_class_share_prob {
                        let pool = &pools[c];
                        if pool.len() == 1 || rng.gen::<f64>() < config.seed_share {
                            pool[0].clone()
                        } else {
                            pool[1 + rng.gen_range(0..pool.len() - 1)].clone()
                        }
                    } else {
                        let leak = &leak_pools[c];
                        if leak.is_empty() {
                            pools[c][0].clone()
                        } else {
                            leak[rng.gen_range(0..leak.len())].clone()
                        }
                    };
                    tags.push(tag);
                }
                records.push(PostRecord {
                    user: user.clone(),
                    hashtags: tags,
                    timestamp: Some(draw_ts(&mut rng, config)),
                });
            }
            for _ in 0..config.hub_posts_per_user {
                let hub = hubs[rng.gen_range(0..hubs.len())].clone();
                records.push(PostRecord {
                    user: user.clone(),
                    hashtags: vec![hub],
                    timestamp: Some(draw_ts(&mut rng, config)),
                });
            }
        }
    }

    let golden_users = (0..t)
        .map(|c| {
            (0..config.users_per_class)
                .map(|k| format!("u{c}x{k}"))
                .collect()
        })
        .collect();
    let golden_hashtags = pools
        .iter()
        .map(|pool| pool.iter().cloned().collect())
        .collect();
    let golden = GoldenSet::new(golden_users, golden_hashtags)?;

    let seeds = SeedSet::new(
        (0..t).map(seed_tag).collect(),
        Some((0..t).map(|c| format!("class{c}")).collect()),
    )?;

    Ok(SynthOutput {
        records,
        golden,
        seeds,
    })
}

fn draw_ts(rng: &mut ChaCha8Rng, config: &SynthConfig) -> i64 {
    if config.ts_span == 0 {
        config.ts_origin
    } else {
        config.ts_origin + rng.gen_range(0..config.ts_span) as i64
    }
}

/// Named corpus presets.
///
/// `reference` is the pinned calibration corpus the acceptance thresholds
/// were fixed against; `reference-hubs` adds five symmetric hub hashtags
/// to it; `large` is the desk-scale runtime corpus (10,000 users, 2,000
/// hashtags, 400,000 posts); `tiny` is for smoke tests.
pub fn preset(name: &str) -> Option<SynthConfig> {
    match name {
        "reference" => Some(SynthConfig {
            classes: 2,
            users_per_class: 500,
            hashtags_per_class: 50,
            shared_general_hashtags: 10,
            background_hashtags: 200,
            in_class_share_prob: 0.8,
            posts_per_user: 40,
            tags_per_post: 3,
            seed_share: 0.2,
            activity_skew: None,
            activity_jitter: 0.0,
            hub_hashtags: 0,
            hub_posts_per_user: 0,
            ts_origin: 0,
            ts_span: 0,
            rng_seed: 1729,
        }),
        "reference-hubs" => Some(SynthConfig {
            hub_hashtags: 5,
            hub_posts_per_user: 5,
            ..preset("reference").expect("reference preset exists")
        }),
        "large" => Some(SynthConfig {
            users_per_class: 5000,
            hashtags_per_class: 395,
            background_hashtags: 1200,
            ..preset("reference").expect("reference preset exists")
        }),
        "tiny" => Some(SynthConfig {
            classes: 2,
            users_per_class: 20,
            hashtags_per_class: 8,
            shared_general_hashtags: 2,
            background_hashtags: 0,
            in_class_share_prob: 0.9,
            posts_per_user: 10,
            tags_per_post: 3,
            seed_share: 0.2,
            activity_skew: None,
            activity_jitter: 0.0,
            hub_hashtags: 0,
            hub_posts_per_user: 0,
            ts_origin: 0,
            ts_span: 0,
            rng_seed: 7,
        }),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 4] = ["reference", "reference-hubs", "large", "tiny"];
