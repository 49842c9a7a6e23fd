use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "stancewalk",
    version,
    about = "Classify social-media users and keywords into stance classes from hashtag-sharing counts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Classify hashtags and users; writes assignment tables and a manifest.
    Classify(ClassifyArgs),
    /// Score assignments against a golden set; optionally compare methods.
    Eval(EvalArgs),
    /// Classify each time window separately and report class composition.
    Evolve(EvolveArgs),
    /// Generate a synthetic planted-partition corpus.
    Synth(SynthArgs),
    /// Measure classification runtime per method.
    Bench(BenchArgs),
}

/// Options shared by the classifying subcommands. Unset values fall back
/// to the configuration file (when given), then to built-in defaults.
#[derive(Args, Clone)]
pub struct CommonOpts {
    /// Seed hashtags, comma-separated, one per stance class.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<String>,

    /// Class labels aligned with the seeds (defaults to the seeds).
    #[arg(long, value_delimiter = ',')]
    pub class_names: Vec<String>,

    /// lrm, srm, hsm, lpm, or rdm.
    #[arg(long)]
    pub method: Option<String>,

    /// Walk steps.
    #[arg(long)]
    pub rho: Option<usize>,

    /// Entropy-dampening scope: all-incident, seed-edges, or off.
    #[arg(long)]
    pub dampening: Option<String>,

    /// Intensity orientation: concentration or entropy.
    #[arg(long)]
    pub orientation: Option<String>,

    /// Count a hashtag once per post instead of per occurrence.
    #[arg(long)]
    pub dedup: bool,

    /// Fail on the first malformed input line instead of skipping it.
    #[arg(long)]
    pub strict: bool,

    /// Generator seed for the random baseline.
    #[arg(long)]
    pub rng_seed: Option<u64>,

    #[arg(long)]
    pub lpm_max_iterations: Option<usize>,

    #[arg(long)]
    pub lpm_tolerance: Option<f64>,

    /// Count unclassified entities in percentage denominators.
    #[arg(long)]
    pub include_unclassified: bool,

    /// Cap on internal parallelism; outputs are identical for any value.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Field delimiter for every table read or written.
    #[arg(long)]
    pub delimiter: Option<String>,

    /// TOML file supplying any of these options; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Input corpus format.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum InputFormat {
    /// Decide from the file extension.
    Auto,
    /// Line-delimited post records.
    Jsonl,
    /// Pre-aggregated user,hashtag,count triples.
    Csv,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Post records (.jsonl) or pre-aggregated triples (.csv).
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Output directory for the assignment tables and the manifest.
    #[arg(long)]
    pub out: PathBuf,

    /// Also dump the hashtag graph as edge triples.
    #[arg(long)]
    pub dump_graph: Option<PathBuf>,

    /// Also dump non-zero seed similarities.
    #[arg(long)]
    pub dump_similarities: Option<PathBuf>,

    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Golden-set file: class,entity_kind,entity_id rows.
    #[arg(long)]
    pub golden: PathBuf,

    /// Previously written hashtag assignment table.
    #[arg(long)]
    pub hashtag_assignments: Option<PathBuf>,

    /// Previously written user assignment table.
    #[arg(long)]
    pub user_assignments: Option<PathBuf>,

    /// Corpus to classify when comparing methods.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Methods to run and score against the golden set, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub compare: Vec<String>,

    /// Output directory for the report table and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("window")
        .required(true)
        .args(["window_days", "window_seconds"])
))]
pub struct EvolveArgs {
    /// Post records (.jsonl); windowed runs need timestamps.
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Window length in days.
    #[arg(long, conflicts_with = "window_seconds")]
    pub window_days: Option<u64>,

    /// Window length in seconds.
    #[arg(long)]
    pub window_seconds: Option<u64>,

    /// Window origin: epoch seconds or a YYYY-MM-DD date (UTC midnight).
    #[arg(long)]
    pub origin: String,

    /// Output directory for the evolution table and the manifest.
    #[arg(long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Start from a named preset: reference, reference-hubs, large, tiny.
    #[arg(long)]
    pub preset: Option<String>,

    #[arg(long)]
    pub classes: Option<usize>,

    #[arg(long)]
    pub users_per_class: Option<usize>,

    #[arg(long)]
    pub hashtags_per_class: Option<usize>,

    /// Shared general hashtags.
    #[arg(long)]
    pub general: Option<usize>,

    /// Rarely-used background noise hashtags.
    #[arg(long)]
    pub background: Option<usize>,

    /// In-class share probability.
    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long)]
    pub posts_per_user: Option<usize>,

    #[arg(long)]
    pub tags_per_post: Option<usize>,

    /// Probability that an in-class draw picks the class seed.
    #[arg(long)]
    pub seed_share: Option<f64>,

    /// Per-class activity multipliers, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub activity_skew: Vec<f64>,

    /// Per-user activity spread in [0, 1).
    #[arg(long)]
    pub activity_jitter: Option<f64>,

    #[arg(long)]
    pub hub_hashtags: Option<usize>,

    #[arg(long)]
    pub hub_posts_per_user: Option<usize>,

    #[arg(long)]
    pub ts_origin: Option<i64>,

    #[arg(long)]
    pub ts_span: Option<u64>,

    #[arg(long)]
    pub rng_seed: Option<u64>,

    /// Output directory for posts.jsonl, golden.csv, and the manifest.
    #[arg(long)]
    pub out: PathBuf,

    /// Field delimiter for golden.csv.
    #[arg(long)]
    pub delimiter: Option<String>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Methods to time, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<String>,

    /// Timing repetitions per method; the mean is reported.
    #[arg(long)]
    pub repeat: Option<usize>,

    /// Output directory for the runtime table and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub common: CommonOpts,
}
