//! Resolution of effective run settings from flags, the optional
//! configuration file, and built-in defaults (flags win over the file).

use std::path::Path;

use serde::Deserialize;

use stancewalk::baselines::BaselineConfig;
use stancewalk::classify::IntensityOrientation;
use stancewalk::ingest::SeedSet;
use stancewalk::pipeline::{Method, PipelineConfig};
use stancewalk::walk::{DampeningMode, WalkConfig};

use crate::args::CommonOpts;
use crate::commands::CliError;

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seeds: Option<Vec<String>>,
    pub class_names: Option<Vec<String>>,
    pub method: Option<String>,
    pub rho: Option<usize>,
    pub dampening: Option<String>,
    pub orientation: Option<String>,
    pub dedup: Option<bool>,
    pub strict: Option<bool>,
    pub rng_seed: Option<u64>,
    pub lpm_max_iterations: Option<usize>,
    pub lpm_tolerance: Option<f64>,
    pub include_unclassified: Option<bool>,
    pub threads: Option<usize>,
    pub delimiter: Option<String>,
    pub repeat: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::domain(format!("config {}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run.
pub struct Settings {
    pub seeds: SeedSet,
    pub pipeline: PipelineConfig,
    pub strict: bool,
    pub delimiter: char,
    /// 0 leaves the thread-pool size up to the runtime.
    pub threads: usize,
    pub repeat: usize,
}

fn parse_dampening(value: &str) -> Result<DampeningMode, CliError> {
    match value {
        "all-incident" => Ok(DampeningMode::AllIncident),
        "seed-edges" => Ok(DampeningMode::SeedEdgesOnly),
        "off" => Ok(DampeningMode::Off),
        other => Err(CliError::domain(format!(
            "unknown dampening mode {other:?} (expected all-incident, seed-edges, or off)"
        ))),
    }
}

fn parse_orientation(value: &str) -> Result<IntensityOrientation, CliError> {
    match value {
        "concentration" => Ok(IntensityOrientation::Concentration),
        "entropy" => Ok(IntensityOrientation::Entropy),
        other => Err(CliError::domain(format!(
            "unknown intensity orientation {other:?} (expected concentration or entropy)"
        ))),
    }
}

pub fn parse_method(value: &str) -> Result<Method, CliError> {
    value
        .parse::<Method>()
        .map_err(|e| CliError::domain(e.to_string()))
}

fn parse_delimiter(value: &str) -> Result<char, CliError> {
    let unescaped = match value {
        "\\t" => "\t",
        other => other,
    };
    let mut chars = unescaped.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(CliError::domain(format!(
            "delimiter must be a single character, got {value:?}"
        ))),
    }
}

/// Merge flags over the file config over defaults.
pub fn resolve(common: &CommonOpts) -> Result<Settings, CliError> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let seeds_raw: Vec<String> = if !common.seeds.is_empty() {
        common.seeds.clone()
    } else {
        file.seeds.clone().unwrap_or_default()
    };
    if seeds_raw.len() < 2 {
        return Err(CliError::domain(
            "at least 2 seed hashtags are required (--seeds a,b)".to_string(),
        ));
    }
    let class_names: Option<Vec<String>> = if !common.class_names.is_empty() {
        Some(common.class_names.clone())
    } else {
        file.class_names.clone()
    };
    let seeds = SeedSet::new(seeds_raw, class_names).map_err(CliError::from)?;

    let method = match common.method.as_deref().or(file.method.as_deref()) {
        Some(name) => parse_method(name)?,
        None => Method::Lrm,
    };
    let dampening = match common.dampening.as_deref().or(file.dampening.as_deref()) {
        Some(value) => parse_dampening(value)?,
        None => DampeningMode::AllIncident,
    };
    let orientation = match common
        .orientation
        .as_deref()
        .or(file.orientation.as_deref())
    {
        Some(value) => parse_orientation(value)?,
        None => IntensityOrientation::Concentration,
    };
    let rho = common.rho.or(file.rho).unwrap_or(10);
    let baseline = BaselineConfig {
        rng_seed: common.rng_seed.or(file.rng_seed).unwrap_or(0),
        rho,
        max_iterations: common
            .lpm_max_iterations
            .or(file.lpm_max_iterations)
            .unwrap_or(1000),
        tolerance: common.lpm_tolerance.or(file.lpm_tolerance).unwrap_or(1e-8),
    };
    let pipeline = PipelineConfig {
        method,
        walk: WalkConfig {
            rho,
            dampening,
            block_other_seeds: true,
        },
        orientation,
        dedup_within_post: common.dedup || file.dedup.unwrap_or(false),
        baseline,
        include_unclassified: common.include_unclassified
            || file.include_unclassified.unwrap_or(false),
    };

    let delimiter = match common.delimiter.as_deref().or(file.delimiter.as_deref()) {
        Some(value) => parse_delimiter(value)?,
        None => ',',
    };

    Ok(Settings {
        seeds,
        pipeline,
        strict: common.strict || file.strict.unwrap_or(false),
        delimiter,
        threads: common.threads.or(file.threads).unwrap_or(0),
        repeat: file.repeat.unwrap_or(3),
    })
}
