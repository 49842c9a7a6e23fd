//! Delimiter-separated tables and dumps: assignment outputs, evaluation
//! reports, evolution series, graph and similarity dumps, golden-set
//! files, and the line-delimited post format.
//!
//! Every table carries a header row. Fields are written verbatim, so
//! entity ids must not contain the delimiter.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde_json::json;

use crate::classify::StanceAssignments;
use crate::error::{Error, Result};
use crate::eval::{EvalReport, GoldenSet, WindowOutcome, WindowReport};
use crate::graph::HashtagGraph;
use crate::ingest::{PostRecord, SeedSet, SharingMatrix};
use crate::walk::SimilarityScores;
use crate::Scalar;

/// Class column value for entities no class could be assigned to.
pub const UNCLASSIFIED_LABEL: &str = "unclassified";

fn fmt<F: Scalar>(value: F) -> String {
    format!("{value:.6}")
}

fn class_label(seeds: &SeedSet, class: Option<usize>) -> &str {
    match class {
        Some(c) => seeds.label(c),
        None => UNCLASSIFIED_LABEL,
    }
}

/// Write the `hashtag,class,intensity,tie` table; baseline outputs add a
/// trailing `method` column.
pub fn write_hashtag_table<F: Scalar>(
    out: &mut impl Write,
    matrix: &SharingMatrix,
    assignments: &StanceAssignments<F>,
    seeds: &SeedSet,
    method: Option<&str>,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    match method {
        Some(_) => writeln!(out, "hashtag{d}class{d}intensity{d}tie{d}method")?,
        None => writeln!(out, "hashtag{d}class{d}intensity{d}tie")?,
    }
    for (i, assignment) in assignments.hashtags.iter().enumerate() {
        let intensity = assignment.intensity.map(fmt).unwrap_or_default();
        write!(
            out,
            "{}{d}{}{d}{}{d}{}",
            matrix.hashtag_name(i),
            class_label(seeds, assignment.class),
            intensity,
            assignment.tie.as_str(),
        )?;
        match method {
            Some(name) => writeln!(out, "{d}{name}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

/// Write the `user,class,l_1..l_t,tie` table; baseline outputs add a
/// trailing `method` column.
pub fn write_user_table<F: Scalar>(
    out: &mut impl Write,
    matrix: &SharingMatrix,
    assignments: &StanceAssignments<F>,
    seeds: &SeedSet,
    method: Option<&str>,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    let t = seeds.class_count();
    write!(out, "user{d}class")?;
    for c in 1..=t {
        write!(out, "{d}l_{c}")?;
    }
    write!(out, "{d}tie")?;
    match method {
        Some(_) => writeln!(out, "{d}method")?,
        None => writeln!(out)?,
    }
    for (k, assignment) in assignments.users.iter().enumerate() {
        write!(
            out,
            "{}{d}{}",
            matrix.user_name(k),
            class_label(seeds, assignment.class),
        )?;
        for c in 0..t {
            write!(out, "{d}{}", fmt(assignment.inclination[c]))?;
        }
        write!(out, "{d}{}", assignment.tie.as_str())?;
        match method {
            Some(name) => writeln!(out, "{d}{name}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

/// Read an assignment table back into an id -> class map. Only the first
/// two columns matter; extra columns (intensity, inclination, method) are
/// ignored.
pub fn read_assignment_classes(
    reader: impl BufRead,
    seeds: &SeedSet,
    delimiter: char,
) -> Result<HashMap<String, Option<usize>>> {
    let mut map = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(delimiter);
        let id = fields.next().unwrap_or_default().to_string();
        let label = fields.next().unwrap_or_default();
        if idx == 0 && (id == "hashtag" || id == "user") {
            continue;
        }
        let class = if label == UNCLASSIFIED_LABEL {
            None
        } else {
            match seeds.class_of_label(label) {
                Some(c) => Some(c),
                None => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("unknown class label {label:?}"),
                    })
                }
            }
        };
        map.insert(id, class);
    }
    Ok(map)
}

/// Write non-zero `class,hashtag,score` similarity triples.
pub fn write_similarity_dump<F: Scalar>(
    out: &mut impl Write,
    matrix: &SharingMatrix,
    scores: &SimilarityScores<F>,
    seeds: &SeedSet,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    writeln!(out, "class{d}hashtag{d}score")?;
    for c in 0..scores.class_count() {
        for (i, &score) in scores.row(c).iter().enumerate() {
            if score > F::zero() {
                writeln!(
                    out,
                    "{}{d}{}{d}{}",
                    seeds.label(c),
                    matrix.hashtag_name(i),
                    fmt(score),
                )?;
            }
        }
    }
    Ok(())
}

/// Write `hashtag_i,hashtag_j,weight` triples, each undirected edge once.
pub fn write_graph_dump<F: Scalar>(
    out: &mut impl Write,
    graph: &HashtagGraph<F>,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    writeln!(out, "hashtag_i{d}hashtag_j{d}weight")?;
    for (i, j, w) in graph.edges() {
        writeln!(
            out,
            "{}{d}{}{d}{}",
            graph.hashtag_name(i),
            graph.hashtag_name(j),
            fmt(w),
        )?;
    }
    Ok(())
}

/// Write per-class F1 rows plus a `macro` row per (method, kind) report.
pub fn write_eval_reports<F: Scalar>(
    out: &mut impl Write,
    reports: &[(String, String, EvalReport<F>)],
    seeds: &SeedSet,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    writeln!(
        out,
        "method{d}kind{d}class{d}f1{d}support{d}runtime_seconds"
    )?;
    for (method, kind, report) in reports {
        for (c, &f1) in report.per_class_f1.iter().enumerate() {
            writeln!(
                out,
                "{method}{d}{kind}{d}{}{d}{}{d}{}{d}{:.6}",
                seeds.label(c),
                fmt(f1),
                report.support[c],
                report.runtime_seconds,
            )?;
        }
        let total: usize = report.support.iter().sum();
        writeln!(
            out,
            "{method}{d}{kind}{d}macro{d}{}{d}{total}{d}{:.6}",
            fmt(report.macro_f1),
            report.runtime_seconds,
        )?;
    }
    Ok(())
}

/// Write the evolution series: one row per class per window plus an
/// `unclassified` row (whose percentages are taken over all entities).
/// Skipped windows emit a single row with empty numeric fields.
pub fn write_evolution<F: Scalar>(
    out: &mut impl Write,
    reports: &[WindowReport<F>],
    seeds: &SeedSet,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    writeln!(
        out,
        "window{d}class{d}user_pct{d}hashtag_pct{d}user_count{d}hashtag_count"
    )?;
    for report in reports {
        let w = report.window;
        match &report.outcome {
            WindowOutcome::Skipped { reason } => {
                writeln!(out, "{w}{d}skipped: {reason}{d}{d}{d}{d}")?;
            }
            WindowOutcome::Classified(comp) => {
                for c in 0..seeds.class_count() {
                    writeln!(
                        out,
                        "{w}{d}{}{d}{}{d}{}{d}{}{d}{}",
                        seeds.label(c),
                        fmt(comp.user_pct[c]),
                        fmt(comp.hashtag_pct[c]),
                        comp.user_counts[c],
                        comp.hashtag_counts[c],
                    )?;
                }
                let users_total: usize =
                    comp.user_counts.iter().sum::<usize>() + comp.unclassified_users;
                let hashtags_total: usize =
                    comp.hashtag_counts.iter().sum::<usize>() + comp.unclassified_hashtags;
                let user_pct = if users_total == 0 {
                    0.0
                } else {
                    comp.unclassified_users as f64 / users_total as f64 * 100.0
                };
                let hashtag_pct = if hashtags_total == 0 {
                    0.0
                } else {
                    comp.unclassified_hashtags as f64 / hashtags_total as f64 * 100.0
                };
                writeln!(
                    out,
                    "{w}{d}{UNCLASSIFIED_LABEL}{d}{user_pct:.6}{d}{hashtag_pct:.6}{d}{}{d}{}",
                    comp.unclassified_users, comp.unclassified_hashtags,
                )?;
            }
        }
    }
    Ok(())
}

/// Write records in the line-delimited input format (`user`, `tags`,
/// optional `ts` per line).
pub fn write_posts_jsonl(out: &mut impl Write, records: &[PostRecord]) -> Result<()> {
    for record in records {
        let value = match record.timestamp {
            Some(ts) => json!({ "user": record.user, "tags": record.hashtags, "ts": ts }),
            None => json!({ "user": record.user, "tags": record.hashtags }),
        };
        writeln!(out, "{value}")?;
    }
    Ok(())
}

/// Parse pre-aggregated `user,hashtag,count` triples.
pub fn read_triples_csv(reader: impl BufRead, delimiter: char) -> Result<SharingMatrix> {
    let mut triples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        if idx == 0 && fields.first() == Some(&"user") {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let count: u64 = fields[2].trim().parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("bad count {:?}", fields[2]),
        })?;
        triples.push((fields[0].to_string(), fields[1].to_string(), count));
    }
    SharingMatrix::from_triples(triples)
}

/// Write a golden set as `class,entity_kind,entity_id` rows.
pub fn write_golden_csv(
    out: &mut impl Write,
    golden: &GoldenSet,
    seeds: &SeedSet,
    delimiter: char,
) -> Result<()> {
    let d = delimiter;
    writeln!(out, "class{d}entity_kind{d}entity_id")?;
    for (kind, sets) in [("user", &golden.users), ("hashtag", &golden.hashtags)] {
        for (c, set) in sets.iter().enumerate() {
            for id in set {
                writeln!(out, "{}{d}{kind}{d}{id}", seeds.label(c))?;
            }
        }
    }
    Ok(())
}

/// Read a `class,entity_kind,entity_id` golden-set file. Class labels
/// must match the seed set's labels.
pub fn read_golden_csv(
    reader: impl BufRead,
    seeds: &SeedSet,
    delimiter: char,
) -> Result<GoldenSet> {
    let t = seeds.class_count();
    let mut users: Vec<BTreeSet<String>> = vec![BTreeSet::new(); t];
    let mut hashtags: Vec<BTreeSet<String>> = vec![BTreeSet::new(); t];
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        if idx == 0 && fields.first() == Some(&"class") {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let class = seeds
            .class_of_label(fields[0])
            .ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("unknown class label {:?}", fields[0]),
            })?;
        match fields[1] {
            "user" => {
                users[class].insert(fields[2].to_string());
            }
            "hashtag" => {
                hashtags[class].insert(fields[2].to_string());
            }
            other => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("unknown entity kind {other:?}"),
                })
            }
        }
    }
    GoldenSet::new(users, hashtags)
}
