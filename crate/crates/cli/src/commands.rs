use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::json;

use stancewalk::eval::{composition, evolve, prediction_maps, score, time_run, EvalReport};
use stancewalk::ingest::parse_posts;
use stancewalk::pipeline::{run as run_pipeline, CorpusInput, Method, PipelineConfig, PipelineRun};
use stancewalk::synth;
use stancewalk::tables;
use stancewalk::Error;

use crate::args::{
    BenchArgs, ClassifyArgs, Cli, Command, EvalArgs, EvolveArgs, InputFormat, SynthArgs,
};
use crate::manifest::RunManifest;
use crate::settings::{parse_method, resolve, Settings};

/// An error carrying its process exit code: 1 for i/o, 2 for domain
/// errors.
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn io(message: String) -> Self {
        Self { message, code: 1 }
    }

    pub fn domain(message: String) -> Self {
        Self { message, code: 2 }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io(_) => 1,
            _ => 2,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn init_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn open_reader(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(format!("opening {}: {e}", path.display())))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("creating {}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::io(format!("creating directory {}: {e}", path.display())))
}

fn is_triple_format(path: &Path, format: InputFormat) -> bool {
    match format {
        InputFormat::Jsonl => false,
        InputFormat::Csv => true,
        InputFormat::Auto => matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("csv") | Some("tsv")
        ),
    }
}

fn load_corpus(
    path: &Path,
    format: InputFormat,
    strict: bool,
    delimiter: char,
) -> Result<CorpusInput, CliError> {
    let reader = open_reader(path)?;
    if is_triple_format(path, format) {
        let matrix = tables::read_triples_csv(reader, delimiter)?;
        Ok(CorpusInput::Aggregated(matrix))
    } else {
        let outcome = parse_posts(reader, strict)?;
        for diagnostic in &outcome.diagnostics {
            eprintln!(
                "warning: {}:{}: {} (line skipped)",
                path.display(),
                diagnostic.line,
                diagnostic.message
            );
        }
        Ok(CorpusInput::Posts(outcome.records))
    }
}

fn pipeline_config_json(settings: &Settings, format: InputFormat) -> serde_json::Value {
    json!({
        "pipeline": settings.pipeline,
        "strict": settings.strict,
        "format": format!("{format:?}").to_lowercase(),
    })
}

fn method_column(method: Method) -> Option<&'static str> {
    match method {
        Method::Lrm => None,
        other => Some(other.as_str()),
    }
}

fn fill_manifest(manifest: &mut RunManifest, settings: &Settings) {
    manifest.seeds = settings.seeds.seeds().to_vec();
    manifest.class_names = settings.seeds.class_names().map(<[String]>::to_vec);
    manifest.delimiter = settings.delimiter.to_string();
    manifest.rng_seeds = vec![settings.pipeline.baseline.rng_seed];
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let settings = resolve(&args.common)?;
    init_threads(settings.threads);

    let corpus = load_corpus(
        &args.input,
        args.format,
        settings.strict,
        settings.delimiter,
    )?;
    let outcome: PipelineRun = run_pipeline(&corpus, &settings.seeds, &settings.pipeline)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    ensure_dir(&args.out)?;
    let d = settings.delimiter;
    let method = settings.pipeline.method;
    let hashtags_path = args.out.join("hashtags.csv");
    let users_path = args.out.join("users.csv");
    {
        let mut out = create_writer(&hashtags_path)?;
        tables::write_hashtag_table(
            &mut out,
            &outcome.matrix,
            &outcome.assignments,
            &settings.seeds,
            method_column(method),
            d,
        )?;
    }
    {
        let mut out = create_writer(&users_path)?;
        tables::write_user_table(
            &mut out,
            &outcome.matrix,
            &outcome.assignments,
            &settings.seeds,
            method_column(method),
            d,
        )?;
    }

    let mut extra_outputs = Vec::new();
    if let Some(path) = &args.dump_graph {
        match &outcome.graph {
            Some(graph) => {
                let mut out = create_writer(path)?;
                tables::write_graph_dump(&mut out, graph, d)?;
                extra_outputs.push(path.clone());
            }
            None => eprintln!("warning: method {method} builds no sharing graph; dump skipped"),
        }
    }
    if let Some(path) = &args.dump_similarities {
        match &outcome.similarities {
            Some(scores) => {
                let mut out = create_writer(path)?;
                tables::write_similarity_dump(
                    &mut out,
                    &outcome.matrix,
                    scores,
                    &settings.seeds,
                    d,
                )?;
                extra_outputs.push(path.clone());
            }
            None => {
                eprintln!("warning: method {method} produces no similarity matrix; dump skipped")
            }
        }
    }

    let comp = composition(
        &outcome.assignments,
        settings.seeds.class_count(),
        settings.pipeline.include_unclassified,
    );
    println!(
        "classified {} hashtags and {} users with {method}",
        outcome.matrix.hashtag_count(),
        outcome.matrix.user_count()
    );
    for c in 0..settings.seeds.class_count() {
        println!(
            "  {}: {} hashtags, {} users",
            settings.seeds.label(c),
            comp.hashtag_counts[c],
            comp.user_counts[c]
        );
    }
    println!(
        "  unclassified: {} hashtags, {} users",
        comp.unclassified_hashtags, comp.unclassified_users
    );

    let mut manifest = RunManifest::new("classify");
    fill_manifest(&mut manifest, &settings);
    manifest.add_input(&args.input)?;
    manifest.method = Some(method.as_str().to_string());
    manifest.config = pipeline_config_json(&settings, args.format);
    manifest.add_output(&hashtags_path, &args.out)?;
    manifest.add_output(&users_path, &args.out)?;
    for path in &extra_outputs {
        manifest.add_output(path, &args.out)?;
    }
    manifest.write(&args.out)
}

/// Restrict golden sets to entities the predictions cover, reporting the
/// dropped ids.
fn restrict_sets(
    sets: &[BTreeSet<String>],
    has: impl Fn(&str) -> bool,
) -> (Vec<BTreeSet<String>>, Vec<String>) {
    let mut dropped = Vec::new();
    let restricted = sets
        .iter()
        .map(|set| {
            set.iter()
                .filter(|id| {
                    if has(id) {
                        true
                    } else {
                        dropped.push((*id).clone());
                        false
                    }
                })
                .cloned()
                .collect()
        })
        .collect();
    (restricted, dropped)
}

fn warn_dropped(kind: &str, dropped: &[String]) {
    if dropped.is_empty() {
        return;
    }
    let shown: Vec<&str> = dropped.iter().take(10).map(String::as_str).collect();
    let suffix = if dropped.len() > shown.len() {
        format!(" and {} more", dropped.len() - shown.len())
    } else {
        String::new()
    };
    eprintln!(
        "warning: {} golden {kind} not present in the evaluated corpus (dropped): {}{suffix}",
        dropped.len(),
        shown.join(", ")
    );
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let settings = resolve(&args.common)?;
    init_threads(settings.threads);
    let d = settings.delimiter;

    let golden = tables::read_golden_csv(open_reader(&args.golden)?, &settings.seeds, d)?;
    let mut reports: Vec<(String, String, EvalReport<f64>)> = Vec::new();

    let assignments_mode = args.hashtag_assignments.is_some() || args.user_assignments.is_some();
    if assignments_mode {
        let inputs = [
            ("hashtags", &args.hashtag_assignments, &golden.hashtags),
            ("users", &args.user_assignments, &golden.users),
        ];
        for (kind, path, golden_sets) in inputs {
            let Some(path) = path else { continue };
            if golden_sets.iter().all(BTreeSet::is_empty) {
                eprintln!("warning: golden set lists no {kind}; skipping that report");
                continue;
            }
            let predictions =
                tables::read_assignment_classes(open_reader(path)?, &settings.seeds, d)?;
            let (restricted, dropped) =
                restrict_sets(golden_sets, |id| predictions.contains_key(id));
            warn_dropped(kind, &dropped);
            let report = score::<f64>(&predictions, &restricted)?;
            reports.push(("file".to_string(), kind.to_string(), report));
        }
    }

    if !args.compare.is_empty() {
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| CliError::domain("--compare needs --input to classify".to_string()))?;
        let corpus = load_corpus(input, args.format, settings.strict, d)?;
        for name in &args.compare {
            let method = parse_method(name)?;
            let config = PipelineConfig {
                method,
                ..settings.pipeline.clone()
            };
            let (seconds, outcome): (f64, PipelineRun) =
                time_run(1, || run_pipeline(&corpus, &settings.seeds, &config))?;
            let (user_preds, hashtag_preds) =
                prediction_maps(&outcome.matrix, &outcome.assignments);
            let (restricted, dropped) = golden.restrict_to(&outcome.matrix);
            warn_dropped("entities", &dropped);
            for (kind, preds, sets) in [
                ("hashtags", &hashtag_preds, &restricted.hashtags),
                ("users", &user_preds, &restricted.users),
            ] {
                if sets.iter().all(BTreeSet::is_empty) {
                    eprintln!("warning: no golden {kind} to score for {method}");
                    continue;
                }
                let mut report = score::<f64>(preds, sets)?;
                report.runtime_seconds = seconds;
                reports.push((method.as_str().to_string(), kind.to_string(), report));
            }
        }
    }

    if reports.is_empty() {
        return Err(CliError::domain(
            "nothing to evaluate: pass assignment tables or --compare with --input".to_string(),
        ));
    }

    for (method, kind, report) in &reports {
        println!("macro-F1 ({kind}, {method}) = {:.4}", report.macro_f1);
    }

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let report_path = out.join("report.csv");
        {
            let mut file = create_writer(&report_path)?;
            tables::write_eval_reports(&mut file, &reports, &settings.seeds, d)?;
        }
        let mut manifest = RunManifest::new("eval");
        fill_manifest(&mut manifest, &settings);
        manifest.add_input(&args.golden)?;
        for path in [
            &args.hashtag_assignments,
            &args.user_assignments,
            &args.input,
        ]
        .into_iter()
        .flatten()
        {
            manifest.add_input(path)?;
        }
        manifest.config = json!({
            "pipeline": settings.pipeline,
            "compare": args.compare,
        });
        manifest.add_output(&report_path, out)?;
        manifest.write(out)?;
    }
    Ok(())
}

fn parse_origin(value: &str) -> Result<i64, CliError> {
    if let Ok(epoch) = value.parse::<i64>() {
        return Ok(epoch);
    }
    let date = chrono::NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|_| {
        CliError::domain(format!(
            "origin must be epoch seconds or YYYY-MM-DD, got {value:?}"
        ))
    })?;
    Ok(date
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp())
}

fn cmd_evolve(args: EvolveArgs) -> Result<(), CliError> {
    let settings = resolve(&args.common)?;
    init_threads(settings.threads);
    let d = settings.delimiter;

    let corpus = load_corpus(&args.input, args.format, settings.strict, d)?;
    let CorpusInput::Posts(records) = corpus else {
        return Err(CliError::domain(
            "windowed runs need post-level records with timestamps".to_string(),
        ));
    };
    let window_secs = match (args.window_days, args.window_seconds) {
        (Some(days), None) => days * 86_400,
        (None, Some(secs)) => secs,
        _ => unreachable!("clap enforces exactly one window length"),
    };
    let origin = parse_origin(&args.origin)?;

    let reports = evolve::<f64>(
        &records,
        &settings.seeds,
        window_secs,
        origin,
        &settings.pipeline,
    )?;
    for report in &reports {
        if let stancewalk::eval::WindowOutcome::Skipped { reason } = &report.outcome {
            eprintln!("warning: window {} skipped: {reason}", report.window);
        }
    }

    ensure_dir(&args.out)?;
    let evolution_path = args.out.join("evolution.csv");
    {
        let mut file = create_writer(&evolution_path)?;
        tables::write_evolution(&mut file, &reports, &settings.seeds, d)?;
    }
    // The table is small; echo it for quick inspection.
    let mut stdout = std::io::stdout().lock();
    let mut buffer = Vec::new();
    tables::write_evolution(&mut buffer, &reports, &settings.seeds, d)?;
    stdout
        .write_all(&buffer)
        .map_err(|e| CliError::io(e.to_string()))?;

    let mut manifest = RunManifest::new("evolve");
    fill_manifest(&mut manifest, &settings);
    manifest.add_input(&args.input)?;
    manifest.method = Some(settings.pipeline.method.as_str().to_string());
    manifest.config = json!({
        "pipeline": settings.pipeline,
        "window_seconds": window_secs,
        "origin": origin,
    });
    manifest.add_output(&evolution_path, &args.out)?;
    manifest.write(&args.out)
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let mut config = match &args.preset {
        Some(name) => synth::preset(name).ok_or_else(|| {
            CliError::domain(format!(
                "unknown preset {name:?} (available: {})",
                synth::PRESET_NAMES.join(", ")
            ))
        })?,
        None => synth::SynthConfig::default(),
    };
    if let Some(v) = args.classes {
        config.classes = v;
    }
    if let Some(v) = args.users_per_class {
        config.users_per_class = v;
    }
    if let Some(v) = args.hashtags_per_class {
        config.hashtags_per_class = v;
    }
    if let Some(v) = args.general {
        config.shared_general_hashtags = v;
    }
    if let Some(v) = args.background {
        config.background_hashtags = v;
    }
    if let Some(v) = args.epsilon {
        config.in_class_share_prob = v;
    }
    if let Some(v) = args.posts_per_user {
        config.posts_per_user = v;
    }
    if let Some(v) = args.tags_per_post {
        config.tags_per_post = v;
    }
    if let Some(v) = args.seed_share {
        config.seed_share = v;
    }
    if !args.activity_skew.is_empty() {
        config.activity_skew = Some(args.activity_skew.clone());
    }
    if let Some(v) = args.activity_jitter {
        config.activity_jitter = v;
    }
    if let Some(v) = args.hub_hashtags {
        config.hub_hashtags = v;
    }
    if let Some(v) = args.hub_posts_per_user {
        config.hub_posts_per_user = v;
    }
    if let Some(v) = args.ts_origin {
        config.ts_origin = v;
    }
    if let Some(v) = args.ts_span {
        config.ts_span = v;
    }
    if let Some(v) = args.rng_seed {
        config.rng_seed = v;
    }
    let delimiter = match &args.delimiter {
        Some(value) => {
            let mut chars = value.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(CliError::domain(format!(
                        "delimiter must be a single character, got {value:?}"
                    )))
                }
            }
        }
        None => ',',
    };

    let output = synth::generate(&config)?;
    ensure_dir(&args.out)?;
    let posts_path = args.out.join("posts.jsonl");
    let golden_path = args.out.join("golden.csv");
    {
        let mut file = create_writer(&posts_path)?;
        tables::write_posts_jsonl(&mut file, &output.records)?;
    }
    {
        let mut file = create_writer(&golden_path)?;
        tables::write_golden_csv(&mut file, &output.golden, &output.seeds, delimiter)?;
    }

    println!(
        "generated {} posts for {} users across {} classes",
        output.records.len(),
        config.classes * config.users_per_class,
        config.classes
    );
    println!("seeds: {}", output.seeds.seeds().join(","));
    println!("class names: {}", output.seeds.labels().join(","));

    let mut manifest = RunManifest::new("synth");
    manifest.seeds = output.seeds.seeds().to_vec();
    manifest.class_names = output.seeds.class_names().map(<[String]>::to_vec);
    manifest.delimiter = delimiter.to_string();
    manifest.rng_seeds = vec![config.rng_seed];
    manifest.config = serde_json::to_value(&config)
        .map_err(|e| CliError::domain(format!("serializing config: {e}")))?;
    manifest.add_output(&posts_path, &args.out)?;
    manifest.add_output(&golden_path, &args.out)?;
    manifest.write(&args.out)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let settings = resolve(&args.common)?;
    init_threads(settings.threads);
    let d = settings.delimiter;
    let repeat = args.repeat.unwrap_or(settings.repeat);

    let corpus = load_corpus(&args.input, args.format, settings.strict, d)?;
    let mut rows = Vec::new();
    for name in &args.methods {
        let method = parse_method(name)?;
        let config = PipelineConfig {
            method,
            ..settings.pipeline.clone()
        };
        let (seconds, _): (f64, PipelineRun) =
            time_run(repeat, || run_pipeline(&corpus, &settings.seeds, &config))?;
        rows.push((method, seconds));
    }

    println!("method{d}runtime_seconds");
    for (method, seconds) in &rows {
        println!("{method}{d}{seconds:.6}");
    }

    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let bench_path = out.join("bench.csv");
        {
            let mut file = create_writer(&bench_path)?;
            writeln!(file, "method{d}runtime_seconds").map_err(|e| CliError::io(e.to_string()))?;
            for (method, seconds) in &rows {
                writeln!(file, "{method}{d}{seconds:.6}")
                    .map_err(|e| CliError::io(e.to_string()))?;
            }
        }
        let mut manifest = RunManifest::new("bench");
        fill_manifest(&mut manifest, &settings);
        manifest.add_input(&args.input)?;
        manifest.config = json!({
            "pipeline": settings.pipeline,
            "methods": args.methods,
            "repeat": repeat,
        });
        manifest.add_output(&bench_path, out)?;
        manifest.write(out)?;
    }
    Ok(())
}
