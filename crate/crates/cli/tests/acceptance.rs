//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line with the measured values (visible with `--nocapture`).
//!
//! Run with: `cargo test -p stancewalk-cli --test acceptance`

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stancewalk::baselines::plain_walk_similarities;
use stancewalk::classify::{classify_hashtags, classify_users, IntensityOrientation, TieFlag};
use stancewalk::eval::{evolve, prediction_maps, score, WindowOutcome};
use stancewalk::graph::{build_cooccurrence_graph, build_sharing_graph, HashtagGraph};
use stancewalk::ingest::{SeedSet, SharingMatrix};
use stancewalk::pipeline::{run, CorpusInput, Method, PipelineConfig};
use stancewalk::synth::{generate, preset, SynthConfig};
use stancewalk::testkit::{path_enumeration_similarities, random_sharing_matrix};
use stancewalk::walk::{
    all_similarities, build_transition, run_walk, seed_entropies, DampeningMode, WalkConfig,
};

fn two_random_seed_indices(rng: &mut ChaCha8Rng, m: usize) -> (usize, usize) {
    let a = rng.gen_range(0..m);
    let mut b = rng.gen_range(0..m);
    while b == a {
        b = rng.gen_range(0..m);
    }
    (a, b)
}

fn method_config(method: Method) -> PipelineConfig {
    PipelineConfig {
        method,
        ..PipelineConfig::default()
    }
}

/// Macro-F1 for users and hashtags of one method on one corpus.
fn run_and_score(
    records: &[stancewalk::ingest::PostRecord],
    seeds: &SeedSet,
    golden: &stancewalk::eval::GoldenSet,
    method: Method,
) -> (f64, f64) {
    let out = run::<f64>(
        &CorpusInput::Posts(records.to_vec()),
        seeds,
        &method_config(method),
    )
    .unwrap();
    let (user_preds, hashtag_preds) = prediction_maps(&out.matrix, &out.assignments);
    let (restricted, _) = golden.restrict_to(&out.matrix);
    let users = score::<f64>(&user_preds, &restricted.users).unwrap();
    let hashtags = score::<f64>(&hashtag_preds, &restricted.hashtags).unwrap();
    (users.macro_f1, hashtags.macro_f1)
}

#[test]
fn criterion_walk_oracle_equivalence() {
    // 200 random graphs with at most 6 nodes, rho <= 3: the matrix
    // iteration must match explicit path enumeration within 1e-9, in
    // under 10 seconds total.
    let started = Instant::now();
    let modes = [
        DampeningMode::AllIncident,
        DampeningMode::SeedEdgesOnly,
        DampeningMode::Off,
    ];
    let mut max_diff = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    for case in 0..200u64 {
        let matrix = random_sharing_matrix(case, 5, 6, 4);
        let graph: HashtagGraph = build_sharing_graph(&matrix).unwrap();
        let (s0, s1) = two_random_seed_indices(&mut rng, graph.node_count());
        let seed_indices = [s0, s1];
        let config = WalkConfig {
            rho: rng.gen_range(1..=3),
            dampening: modes[case as usize % modes.len()],
            block_other_seeds: case % 2 == 0,
        };
        for active in 0..2 {
            let transition = build_transition(&graph, &seed_indices, active, &config);
            let sims = run_walk(&transition, seed_indices[active], config.rho);
            let oracle = path_enumeration_similarities(
                &transition.to_dense(),
                seed_indices[active],
                config.rho,
            );
            for (i, (&got, &want)) in sims.iter().zip(&oracle).enumerate() {
                let diff = (got - want).abs();
                max_diff = max_diff.max(diff);
                assert!(
                    diff <= 1e-9,
                    "case {case}, node {i}: iteration {got} vs oracle {want}"
                );
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < 10.0,
        "oracle sweep took {elapsed:.2}s (budget 10s)"
    );
    println!(
        "[PASS] walk oracle equivalence: 200 graphs, max |diff| = {max_diff:.2e}, {elapsed:.2}s"
    );
}

#[test]
fn criterion_degenerate_srm_equivalence() {
    // With blocking and dampening disabled, the tailored engine must
    // reproduce the plain walk within 1e-12 on identical graphs.
    let config = WalkConfig {
        rho: 10,
        dampening: DampeningMode::Off,
        block_other_seeds: false,
    };
    let mut max_diff = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0E5);
    let mut check = |graph: &HashtagGraph, seeds: &SeedSet| {
        let seed_indices: Vec<usize> = seeds
            .seeds()
            .iter()
            .map(|s| graph.index_of(s).unwrap())
            .collect();
        let engine = all_similarities(graph, seeds, &config).unwrap();
        let plain = plain_walk_similarities(graph, &seed_indices, config.rho);
        for c in 0..seed_indices.len() {
            for i in 0..graph.node_count() {
                let diff = (engine.value(c, i) - plain.value(c, i)).abs();
                max_diff = max_diff.max(diff);
                assert!(diff <= 1e-12, "class {c}, node {i}: diff {diff}");
            }
        }
    };

    for case in 0..50u64 {
        let matrix = random_sharing_matrix(1000 + case, 6, 8, 5);
        let graph: HashtagGraph = build_sharing_graph(&matrix).unwrap();
        let (a, b) = two_random_seed_indices(&mut rng, graph.node_count());
        let seeds = SeedSet::new(
            vec![
                graph.hashtag_name(a).to_string(),
                graph.hashtag_name(b).to_string(),
            ],
            None,
        )
        .unwrap();
        check(&graph, &seeds);
    }

    // Also on a co-occurrence graph, the flavor the plain walk normally
    // runs on.
    let synth = generate(&preset("tiny").unwrap()).unwrap();
    let matrix = SharingMatrix::aggregate(&synth.records, false).unwrap();
    let cograph: HashtagGraph = build_cooccurrence_graph(&synth.records, &matrix).unwrap();
    check(&cograph, &synth.seeds);

    println!("[PASS] degenerate engine equals plain walk: max |diff| = {max_diff:.2e}");
}

#[test]
fn criterion_range_invariants() {
    // 1,000 random instances: sharing weights, entropies, intensities,
    // inclinations, and macro-F1 all live in [0, 1].
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A9);
    for case in 0..1000u64 {
        let matrix = random_sharing_matrix(40_000 + case, 6, 6, 5);
        let graph: HashtagGraph = build_sharing_graph(&matrix).unwrap();
        for i in 0..graph.node_count() {
            let (_, weights) = graph.row(i);
            for &w in weights {
                assert!((0.0..=1.0).contains(&w), "case {case}: weight {w}");
            }
        }

        let (a, b) = two_random_seed_indices(&mut rng, graph.node_count());
        let seed_indices = [a, b];
        for e in seed_entropies(&graph, &seed_indices) {
            assert!((0.0..=1.0).contains(&e), "case {case}: entropy {e}");
        }

        let seeds = SeedSet::new(
            vec![
                graph.hashtag_name(a).to_string(),
                graph.hashtag_name(b).to_string(),
            ],
            None,
        )
        .unwrap();
        let scores = all_similarities(&graph, &seeds, &WalkConfig::default()).unwrap();
        let hashtags = classify_hashtags(&scores, IntensityOrientation::Concentration);
        for assignment in &hashtags {
            if let Some(intensity) = assignment.intensity {
                assert!(
                    (0.0..=1.0).contains(&intensity),
                    "case {case}: intensity {intensity}"
                );
            }
        }
        let users = classify_users(&matrix, &hashtags, 2);
        for user in &users {
            for &l in &user.inclination {
                assert!((0.0..=1.0).contains(&l), "case {case}: inclination {l}");
            }
        }

        // Random golden partition over the users.
        let mut golden = vec![std::collections::BTreeSet::new(); 2];
        let mut predictions = HashMap::new();
        for (k, user) in users.iter().enumerate() {
            golden[rng.gen_range(0..2usize)].insert(matrix.user_name(k).to_string());
            predictions.insert(matrix.user_name(k).to_string(), user.class);
        }
        let report = score::<f64>(&predictions, &golden).unwrap();
        assert!(
            (0.0..=1.0).contains(&report.macro_f1),
            "case {case}: macro {}",
            report.macro_f1
        );
    }
    println!("[PASS] range invariants hold on 1000 random instances");
}

#[test]
fn criterion_planted_partition_recovery() {
    // On the pinned reference corpus the tailored walk must reach 0.90
    // macro-F1 for users and hashtags and dominate the plain walk, which
    // in turn dominates random assignment.
    let synth = generate(&preset("reference").unwrap()).unwrap();
    let (lrm_users, lrm_hashtags) =
        run_and_score(&synth.records, &synth.seeds, &synth.golden, Method::Lrm);
    let (srm_users, srm_hashtags) =
        run_and_score(&synth.records, &synth.seeds, &synth.golden, Method::Srm);
    let (rdm_users, rdm_hashtags) =
        run_and_score(&synth.records, &synth.seeds, &synth.golden, Method::Rdm);

    assert!(lrm_users >= 0.90, "user macro-F1 {lrm_users:.4} < 0.90");
    assert!(
        lrm_hashtags >= 0.90,
        "hashtag macro-F1 {lrm_hashtags:.4} < 0.90"
    );
    assert!(
        lrm_users >= srm_users && srm_users >= rdm_users,
        "user ordering violated: lrm {lrm_users:.4}, srm {srm_users:.4}, rdm {rdm_users:.4}"
    );
    assert!(
        lrm_hashtags >= srm_hashtags && srm_hashtags >= rdm_hashtags,
        "hashtag ordering violated: lrm {lrm_hashtags:.4}, srm {srm_hashtags:.4}, rdm {rdm_hashtags:.4}"
    );

    // Stronger than argmax agreement: every surviving in-community
    // hashtag must be strictly more similar to its own seed.
    let out = run::<f64>(
        &CorpusInput::Posts(synth.records.clone()),
        &synth.seeds,
        &method_config(Method::Lrm),
    )
    .unwrap();
    let scores = out.similarities.as_ref().unwrap();
    let mut checked = 0usize;
    for (c, set) in synth.golden.hashtags.iter().enumerate() {
        for name in set {
            let Some(i) = out.matrix.hashtag_id(name) else {
                continue;
            };
            let own = scores.value(c, i);
            for other in 0..synth.seeds.class_count() {
                if other != c {
                    assert!(
                        own > scores.value(other, i),
                        "{name}: own-seed similarity {own} not strictly largest"
                    );
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 50, "too few surviving golden hashtags ({checked})");

    println!(
        "[PASS] planted recovery: users lrm={lrm_users:.4} >= srm={srm_users:.4} >= rdm={rdm_users:.4}; \
         hashtags lrm={lrm_hashtags:.4} >= srm={srm_hashtags:.4} >= rdm={rdm_hashtags:.4}; \
         strict own-seed dominance on {checked} surviving hashtags"
    );
}

#[test]
fn criterion_dampening_flattens_hubs() {
    // Five hub hashtags shared symmetrically by both classes must come
    // out with intensities strictly below the median partisan intensity
    // and carry tie or near-tie flags.
    let config = preset("reference-hubs").unwrap();
    let synth = generate(&config).unwrap();
    let out = run::<f64>(
        &CorpusInput::Posts(synth.records.clone()),
        &synth.seeds,
        &method_config(Method::Lrm),
    )
    .unwrap();

    let mut partisan = Vec::new();
    for sets in &synth.golden.hashtags {
        for name in sets {
            if let Some(i) = out.matrix.hashtag_id(name) {
                if let Some(intensity) = out.assignments.hashtags[i].intensity {
                    partisan.push(intensity);
                }
            }
        }
    }
    partisan.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!(!partisan.is_empty());
    let median = partisan[partisan.len() / 2];

    let mut hub_max = 0.0f64;
    for x in 0..config.hub_hashtags {
        let name = format!("hub{x}");
        let i = out
            .matrix
            .hashtag_id(&name)
            .unwrap_or_else(|| panic!("{name} was filtered out"));
        let assignment = &out.assignments.hashtags[i];
        let intensity = assignment
            .intensity
            .unwrap_or_else(|| panic!("{name} is unclassified"));
        hub_max = hub_max.max(intensity);
        assert!(
            intensity < median,
            "{name}: intensity {intensity:.6} not below partisan median {median:.6}"
        );
        assert!(
            matches!(assignment.tie, TieFlag::Near | TieFlag::Exact),
            "{name}: expected a tie or near-tie flag, got {:?}",
            assignment.tie
        );
    }
    println!(
        "[PASS] dampening: hub intensity <= {hub_max:.6} < partisan median {median:.6}, all flagged"
    );
}

#[test]
fn criterion_evolution_tracks_planted_growth() {
    // Two weekly windows; class 1's activity grows 1.3x in the second
    // window, so its share of classified users must strictly increase.
    let base = SynthConfig {
        activity_jitter: 0.5,
        ts_origin: 0,
        ts_span: 604_800,
        rng_seed: 31,
        ..preset("reference").unwrap()
    };
    let grown = SynthConfig {
        activity_skew: Some(vec![1.0, 1.3]),
        ts_origin: 604_800,
        rng_seed: 32,
        ..base.clone()
    };
    let week1 = generate(&base).unwrap();
    let week2 = generate(&grown).unwrap();
    let mut records = week1.records;
    records.extend(week2.records);

    let windows = evolve::<f64>(
        &records,
        &week1.seeds,
        604_800,
        0,
        &method_config(Method::Lrm),
    )
    .unwrap();
    assert_eq!(windows.len(), 2);
    let pct: Vec<f64> = windows
        .iter()
        .map(|w| match &w.outcome {
            WindowOutcome::Classified(comp) => comp.user_pct[1],
            WindowOutcome::Skipped { reason } => panic!("window skipped: {reason}"),
        })
        .collect();
    assert!(
        pct[1] > pct[0],
        "class-1 user share did not grow: {:.2}% -> {:.2}%",
        pct[0],
        pct[1]
    );
    println!(
        "[PASS] evolution: class-1 user share {:.2}% -> {:.2}%",
        pct[0], pct[1]
    );
}

#[test]
fn criterion_deterministic_outputs_across_runs_and_threads() {
    // Identical invocations must produce byte-identical tables and
    // manifests, and a single-threaded run must equal an 8-thread run.
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let status = Command::new(env!("CARGO_BIN_EXE_stancewalk"))
        .args(["synth", "--preset", "reference", "--out"])
        .arg(&corpus)
        .status()
        .unwrap();
    assert!(status.success());

    let classify = |out: &std::path::Path, threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_stancewalk"))
            .args([
                "classify",
                "--input",
                corpus.join("posts.jsonl").to_str().unwrap(),
                "--seeds",
                "seed0,seed1",
                "--class-names",
                "class0,class1",
                "--threads",
                threads,
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    };

    let run_a = dir.path().join("a");
    let run_b = dir.path().join("b");
    let run_mt = dir.path().join("mt");
    classify(&run_a, "1");
    classify(&run_b, "1");
    classify(&run_mt, "8");

    for file in ["hashtags.csv", "users.csv", "manifest.json"] {
        let a = std::fs::read(run_a.join(file)).unwrap();
        let b = std::fs::read(run_b.join(file)).unwrap();
        let mt = std::fs::read(run_mt.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
        assert_eq!(a, mt, "{file} differs between 1 and 8 threads");
    }
    println!("[PASS] determinism: repeated and multi-threaded runs are byte-identical");
}

#[test]
fn criterion_desk_scale_runtime() {
    // Full pipeline on 10,000 users / 2,000 hashtags / 400,000 posts,
    // single-threaded, under 60 seconds (corpus generation and parsing
    // excluded).
    let synth = generate(&preset("large").unwrap()).unwrap();
    assert_eq!(synth.records.len(), 400_000);
    let unique_tags: std::collections::HashSet<&str> = synth
        .records
        .iter()
        .flat_map(|r| r.hashtags.iter().map(String::as_str))
        .collect();
    assert_eq!(unique_tags.len(), 2_000);
    let input = CorpusInput::Posts(synth.records.clone());
    let config = method_config(Method::Lrm);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let started = Instant::now();
    let out = pool
        .install(|| run::<f64>(&input, &synth.seeds, &config))
        .unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    assert_eq!(out.matrix.user_count(), 10_000);
    assert!(
        elapsed < 60.0,
        "single-threaded pipeline took {elapsed:.1}s (budget 60s)"
    );
    println!(
        "[PASS] desk-scale runtime: {elapsed:.2}s single-threaded for {} users / {} hashtags",
        out.matrix.user_count(),
        out.matrix.hashtag_count()
    );
}
