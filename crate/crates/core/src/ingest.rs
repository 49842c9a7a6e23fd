//! Parsing of raw post records, aggregation into the user-by-hashtag
//! sharing matrix, low-engagement filtering, and time windowing.

use std::collections::HashMap;
use std::io::BufRead;

use serde::Deserialize;

use crate::error::{Error, Result};

/// One post: a user sharing a list of normalized hashtags, optionally
/// timestamped (UTC seconds since epoch).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostRecord {
    pub user: String,
    pub hashtags: Vec<String>,
    pub timestamp: Option<i64>,
}

/// Normalize a raw keyword: trim, strip one leading `#`, lowercase.
///
/// No stemming or language-specific processing happens here; the method is
/// deliberately token-agnostic.
pub fn normalize_tag(raw: &str) -> String {
    let trimmed = raw.trim();
    let stripped = trimmed.strip_prefix('#').unwrap_or(trimmed);
    stripped.to_lowercase()
}

/// A skipped input line together with the reason it was skipped.
#[derive(Debug, Clone)]
pub struct LineDiagnostic {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

/// Result of a lenient parse: the good records plus per-line diagnostics.
#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub records: Vec<PostRecord>,
    pub diagnostics: Vec<LineDiagnostic>,
}

#[derive(Deserialize)]
struct RawPost {
    user: String,
    tags: Vec<String>,
    #[serde(default)]
    ts: Option<i64>,
}

/// Parse line-delimited post records (one JSON object per line with fields
/// `user`, `tags`, optional `ts`).
///
/// In lenient mode (`strict = false`) malformed lines are skipped and
/// reported in the outcome's diagnostics; in strict mode the first
/// malformed line aborts the parse. An unreadable stream is fatal either
/// way. Records come back in input order.
pub fn parse_posts(reader: impl BufRead, strict: bool) -> Result<ParseOutcome> {
    let mut outcome = ParseOutcome::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(record) => outcome.records.push(record),
            Err(message) => {
                if strict {
                    return Err(Error::Parse {
                        line: line_no,
                        message,
                    });
                }
                outcome.diagnostics.push(LineDiagnostic {
                    line: line_no,
                    message,
                });
            }
        }
    }
    Ok(outcome)
}

fn parse_line(line: &str) -> std::result::Result<PostRecord, String> {
    let raw: RawPost = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.user.trim().is_empty() {
        return Err("empty user id".to_string());
    }
    let hashtags: Vec<String> = raw
        .tags
        .iter()
        .map(|t| normalize_tag(t))
        .filter(|t| !t.is_empty())
        .collect();
    if hashtags.is_empty() {
        return Err("post has no usable hashtags".to_string());
    }
    Ok(PostRecord {
        user: raw.user.trim().to_string(),
        hashtags,
        timestamp: raw.ts,
    })
}

/// The ordered seed hashtags, one per stance class, with optional class
/// labels aligned to them.
#[derive(Debug, Clone)]
pub struct SeedSet {
    seeds: Vec<String>,
    class_names: Option<Vec<String>>,
}

impl SeedSet {
    /// Build a seed set from raw hashtag strings (normalized here) and
    /// optional class labels. Requires at least two distinct seeds.
    pub fn new(seeds: Vec<String>, class_names: Option<Vec<String>>) -> Result<Self> {
        let seeds: Vec<String> = seeds.iter().map(|s| normalize_tag(s)).collect();
        if seeds.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 seed hashtags, got {}",
                seeds.len()
            )));
        }
        for (i, seed) in seeds.iter().enumerate() {
            if seed.is_empty() {
                return Err(Error::InvalidConfig(format!("seed {} is empty", i + 1)));
            }
            if seeds[..i].contains(seed) {
                return Err(Error::InvalidConfig(format!("duplicate seed {seed:?}")));
            }
        }
        if let Some(names) = &class_names {
            if names.len() != seeds.len() {
                return Err(Error::InvalidConfig(format!(
                    "{} class names for {} seeds",
                    names.len(),
                    seeds.len()
                )));
            }
        }
        Ok(Self { seeds, class_names })
    }

    /// Number of stance classes `t`.
    pub fn class_count(&self) -> usize {
        self.seeds.len()
    }

    pub fn seeds(&self) -> &[String] {
        &self.seeds
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.seeds.iter().any(|s| s == tag)
    }

    /// Human-readable label for class `c`: the configured class name if
    /// given, otherwise the seed hashtag itself.
    pub fn label(&self, c: usize) -> &str {
        match &self.class_names {
            Some(names) => &names[c],
            None => &self.seeds[c],
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.class_count())
            .map(|c| self.label(c).to_string())
            .collect()
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// Class index of a label; accepts either the configured class name
    /// or the seed hashtag itself.
    pub fn class_of_label(&self, label: &str) -> Option<usize> {
        (0..self.class_count()).find(|&c| self.label(c) == label || self.seeds[c] == label)
    }

    /// Resolve every seed to its hashtag index in `matrix`, failing with
    /// the seed name if any is absent.
    pub fn resolve(&self, matrix: &SharingMatrix) -> Result<Vec<usize>> {
        self.seeds
            .iter()
            .map(|s| {
                matrix
                    .hashtag_id(s)
                    .ok_or_else(|| Error::MissingSeed(s.clone()))
            })
            .collect()
    }
}

/// Sparse user-by-hashtag sharing counts with their marginals.
///
/// Rows are users, columns hashtags; `count(k, i)` is the number of times
/// user `k` shared hashtag `i`. Every stored hashtag has a positive total
/// and so does every stored user.
#[derive(Debug, Clone)]
pub struct SharingMatrix {
    users: Vec<String>,
    hashtags: Vec<String>,
    user_index: HashMap<String, usize>,
    hashtag_index: HashMap<String, usize>,
    // CSR over users; columns sorted within each row.
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    counts: Vec<u32>,
    hashtag_totals: Vec<u64>,
    user_totals: Vec<u64>,
}

impl SharingMatrix {
    /// Aggregate parsed records into a sharing matrix. A hashtag repeated
    /// within one post counts with its multiplicity unless
    /// `dedup_within_post` is set.
    pub fn aggregate(records: &[PostRecord], dedup_within_post: bool) -> Result<Self> {
        let mut users: Vec<String> = Vec::new();
        let mut hashtags: Vec<String> = Vec::new();
        let mut user_index: HashMap<String, usize> = HashMap::new();
        let mut hashtag_index: HashMap<String, usize> = HashMap::new();
        let mut cells: HashMap<(u32, u32), u64> = HashMap::new();
        let mut scratch: Vec<&str> = Vec::new();

        for record in records {
            let k = *user_index.entry(record.user.clone()).or_insert_with(|| {
                users.push(record.user.clone());
                users.len() - 1
            });
            scratch.clear();
            scratch.extend(record.hashtags.iter().map(String::as_str));
            if dedup_within_post {
                scratch.sort_unstable();
                scratch.dedup();
            }
            for tag in &scratch {
                let i = match hashtag_index.get(*tag) {
                    Some(&i) => i,
                    None => {
                        hashtags.push((*tag).to_string());
                        hashtag_index.insert((*tag).to_string(), hashtags.len() - 1);
                        hashtags.len() - 1
                    }
                };
                *cells.entry((k as u32, i as u32)).or_insert(0) += 1;
            }
        }

        Self::from_cells(users, hashtags, user_index, hashtag_index, cells)
    }

    /// Build a matrix from pre-aggregated `(user, hashtag, count)` triples.
    /// Hashtags are normalized; zero-count triples are ignored.
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, u64)>,
    {
        let mut users: Vec<String> = Vec::new();
        let mut hashtags: Vec<String> = Vec::new();
        let mut user_index: HashMap<String, usize> = HashMap::new();
        let mut hashtag_index: HashMap<String, usize> = HashMap::new();
        let mut cells: HashMap<(u32, u32), u64> = HashMap::new();

        for (user, tag, count) in triples {
            if count == 0 {
                continue;
            }
            let tag = normalize_tag(&tag);
            if tag.is_empty() || user.trim().is_empty() {
                continue;
            }
            let user = user.trim().to_string();
            let k = *user_index.entry(user.clone()).or_insert_with(|| {
                users.push(user.clone());
                users.len() - 1
            });
            let i = *hashtag_index.entry(tag.clone()).or_insert_with(|| {
                hashtags.push(tag.clone());
                hashtags.len() - 1
            });
            *cells.entry((k as u32, i as u32)).or_insert(0) += count;
        }

        Self::from_cells(users, hashtags, user_index, hashtag_index, cells)
    }

    fn from_cells(
        users: Vec<String>,
        hashtags: Vec<String>,
        user_index: HashMap<String, usize>,
        hashtag_index: HashMap<String, usize>,
        cells: HashMap<(u32, u32), u64>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut entries: Vec<((u32, u32), u64)> = cells.into_iter().collect();
        entries.sort_unstable_by_key(|&(key, _)| key);

        let n = users.len();
        let m = hashtags.len();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut hashtag_totals = vec![0u64; m];
        let mut user_totals = vec![0u64; n];

        row_offsets.push(0);
        let mut row = 0usize;
        for ((k, i), c) in entries {
            while row < k as usize {
                row_offsets.push(col_indices.len());
                row += 1;
            }
            let c32 = u32::try_from(c).unwrap_or(u32::MAX);
            col_indices.push(i);
            counts.push(c32);
            hashtag_totals[i as usize] += c32 as u64;
            user_totals[k as usize] += c32 as u64;
        }
        while row < n {
            row_offsets.push(col_indices.len());
            row += 1;
        }

        Ok(Self {
            users,
            hashtags,
            user_index,
            hashtag_index,
            row_offsets,
            col_indices,
            counts,
            hashtag_totals,
            user_totals,
        })
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn hashtag_count(&self) -> usize {
        self.hashtags.len()
    }

    pub fn user_name(&self, k: usize) -> &str {
        &self.users[k]
    }

    pub fn hashtag_name(&self, i: usize) -> &str {
        &self.hashtags[i]
    }

    pub fn user_names(&self) -> &[String] {
        &self.users
    }

    pub fn hashtag_names(&self) -> &[String] {
        &self.hashtags
    }

    pub fn user_id(&self, name: &str) -> Option<usize> {
        self.user_index.get(name).copied()
    }

    pub fn hashtag_id(&self, tag: &str) -> Option<usize> {
        self.hashtag_index.get(tag).copied()
    }

    /// Total shares of hashtag `i` across all users.
    pub fn hashtag_total(&self, i: usize) -> u64 {
        self.hashtag_totals[i]
    }

    /// Total shares by user `k` across all hashtags.
    pub fn user_total(&self, k: usize) -> u64 {
        self.user_totals[k]
    }

    pub fn hashtag_totals(&self) -> &[u64] {
        &self.hashtag_totals
    }

    pub fn user_totals(&self) -> &[u64] {
        &self.user_totals
    }

    /// Sum of all counts; equals both marginal sums.
    pub fn total_shares(&self) -> u64 {
        self.user_totals.iter().sum()
    }

    /// Non-zero entries of user `k`'s row as parallel slices of
    /// (hashtag index, count), sorted by hashtag index.
    pub fn user_row(&self, k: usize) -> (&[u32], &[u32]) {
        let lo = self.row_offsets[k];
        let hi = self.row_offsets[k + 1];
        (&self.col_indices[lo..hi], &self.counts[lo..hi])
    }

    /// Count for a single (user, hashtag) cell.
    pub fn count(&self, k: usize, i: usize) -> u32 {
        let (cols, counts) = self.user_row(k);
        match cols.binary_search(&(i as u32)) {
            Ok(pos) => counts[pos],
            Err(_) => 0,
        }
    }

    /// Remove low-engagement entities: first hashtags whose total falls
    /// below the mean hashtag total (seeds exempt), then users whose total
    /// falls below the mean user total. Both criteria are evaluated on the
    /// pre-filter matrix and the pass runs exactly once. Entities left
    /// with no remaining shares after the cut are pruned so the marginal
    /// invariants hold; a seed pruned this way surfaces later as a
    /// missing seed.
    pub fn filter_low_engagement(&self, seeds: &SeedSet) -> Result<SharingMatrix> {
        let n = self.user_count();
        let m = self.hashtag_count();
        let hashtag_mean = self.hashtag_totals.iter().sum::<u64>() as f64 / m as f64;
        let user_mean = self.user_totals.iter().sum::<u64>() as f64 / n as f64;

        let keep_hashtag: Vec<bool> = (0..m)
            .map(|i| {
                (self.hashtag_totals[i] as f64) >= hashtag_mean || seeds.contains(&self.hashtags[i])
            })
            .collect();
        let threshold_user: Vec<bool> = (0..n)
            .map(|k| (self.user_totals[k] as f64) >= user_mean)
            .collect();

        // Prune entities that lost every remaining share. A surviving cell
        // keeps both of its endpoints alive, so one pass settles it.
        let mut keep_user = vec![false; n];
        let mut hashtag_seen = vec![false; m];
        let mut kept_users = 0usize;
        for k in 0..n {
            if !threshold_user[k] {
                continue;
            }
            let (cols, _) = self.user_row(k);
            let mut any = false;
            for &i in cols {
                if keep_hashtag[i as usize] {
                    hashtag_seen[i as usize] = true;
                    any = true;
                }
            }
            if any {
                keep_user[k] = true;
                kept_users += 1;
            }
        }

        let hashtags_removed = keep_hashtag.iter().filter(|k| !*k).count();
        if kept_users == 0 {
            return Err(Error::EmptyAfterFilter {
                kind: "user",
                hashtags_removed,
                users_removed: n,
            });
        }
        if !hashtag_seen.iter().any(|&s| s) {
            return Err(Error::EmptyAfterFilter {
                kind: "hashtag",
                hashtags_removed: m,
                users_removed: n - kept_users,
            });
        }

        let mut users = Vec::with_capacity(kept_users);
        let mut user_map = vec![usize::MAX; n];
        for k in 0..n {
            if keep_user[k] {
                user_map[k] = users.len();
                users.push(self.users[k].clone());
            }
        }
        let mut hashtags = Vec::new();
        let mut hashtag_map = vec![usize::MAX; m];
        for i in 0..m {
            if hashtag_seen[i] {
                hashtag_map[i] = hashtags.len();
                hashtags.push(self.hashtags[i].clone());
            }
        }

        let user_index: HashMap<String, usize> = users
            .iter()
            .enumerate()
            .map(|(k, u)| (u.clone(), k))
            .collect();
        let hashtag_index: HashMap<String, usize> = hashtags
            .iter()
            .enumerate()
            .map(|(i, h)| (h.clone(), i))
            .collect();

        let mut row_offsets = Vec::with_capacity(users.len() + 1);
        let mut col_indices = Vec::new();
        let mut counts = Vec::new();
        let mut hashtag_totals = vec![0u64; hashtags.len()];
        let mut user_totals = vec![0u64; users.len()];
        row_offsets.push(0);
        for k in 0..n {
            if !keep_user[k] {
                continue;
            }
            let (cols, row_counts) = self.user_row(k);
            for (&i, &c) in cols.iter().zip(row_counts) {
                let new_i = hashtag_map[i as usize];
                if new_i != usize::MAX {
                    col_indices.push(new_i as u32);
                    counts.push(c);
                    hashtag_totals[new_i] += c as u64;
                    user_totals[user_map[k]] += c as u64;
                }
            }
            row_offsets.push(col_indices.len());
        }

        Ok(SharingMatrix {
            users,
            hashtags,
            user_index,
            hashtag_index,
            row_offsets,
            col_indices,
            counts,
            hashtag_totals,
            user_totals,
        })
    }
}

/// Partition timestamped records into half-open windows
/// `[origin + w*length, origin + (w+1)*length)`, emitted in ascending
/// window order with empty windows omitted. Any record without a
/// timestamp is fatal.
pub fn window(
    records: &[PostRecord],
    window_length_secs: u64,
    origin: i64,
) -> Result<Vec<(i64, Vec<PostRecord>)>> {
    if window_length_secs == 0 {
        return Err(Error::InvalidConfig(
            "window length must be positive".into(),
        ));
    }
    let mut windows: std::collections::BTreeMap<i64, Vec<PostRecord>> =
        std::collections::BTreeMap::new();
    for record in records {
        let ts = record.timestamp.ok_or_else(|| Error::MissingTimestamp {
            user: record.user.clone(),
        })?;
        let idx = (ts - origin).div_euclid(window_length_secs as i64);
        windows.entry(idx).or_default().push(record.clone());
    }
    Ok(windows.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn posts(lines: &str) -> ParseOutcome {
        parse_posts(lines.as_bytes(), false).unwrap()
    }

    #[test]
    fn parse_normalizes_tags() {
        let out = posts(r##"{"user":"u1","tags":["#VoteLabour","GE2019"],"ts":1573900000}"##);
        assert_eq!(out.records.len(), 1);
        let rec = &out.records[0];
        assert_eq!(rec.user, "u1");
        assert_eq!(rec.hashtags, vec!["votelabour", "ge2019"]);
        assert_eq!(rec.timestamp, Some(1573900000));
    }

    #[test]
    fn parse_skips_empty_tag_list_with_diagnostic() {
        let out = posts(r#"{"user":"u1","tags":[]}"#);
        assert!(out.records.is_empty());
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].line, 1);
    }

    #[test]
    fn lenient_mode_counts_records_and_diagnostics() {
        let input = concat!(
            r#"{"user":"u1","tags":["a"]}"#,
            "\n",
            "not json at all\n",
            r#"{"user":"u2","tags":["b"],"ts":7}"#,
            "\n",
        );
        let out = parse_posts(input.as_bytes(), false).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].line, 2);
    }

    #[test]
    fn strict_mode_fails_on_malformed_line() {
        let input = "{\"user\":\"u1\",\"tags\":[\"a\"]}\nbroken\n";
        let err = parse_posts(input.as_bytes(), true).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn tags_reduced_to_empty_are_dropped() {
        let out = posts(r##"{"user":"u1","tags":["#","  ","#Ok"]}"##);
        assert_eq!(out.records[0].hashtags, vec!["ok"]);
    }

    fn rec(user: &str, tags: &[&str]) -> PostRecord {
        PostRecord {
            user: user.to_string(),
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
            timestamp: None,
        }
    }

    #[test]
    fn aggregate_counts_multiplicities() {
        let records = vec![rec("u1", &["a", "b"]), rec("u1", &["a"])];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let a = m.hashtag_id("a").unwrap();
        let b = m.hashtag_id("b").unwrap();
        let u1 = m.user_id("u1").unwrap();
        assert_eq!(m.count(u1, a), 2);
        assert_eq!(m.count(u1, b), 1);
        assert_eq!(m.hashtag_total(a), 2);
        assert_eq!(m.user_total(u1), 3);
    }

    #[test]
    fn repeated_tag_in_one_post_counts_twice() {
        let records = vec![rec("u1", &["a", "a"])];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        assert_eq!(m.count(0, 0), 2);
        let deduped = SharingMatrix::aggregate(&records, true).unwrap();
        assert_eq!(deduped.count(0, 0), 1);
    }

    #[test]
    fn disjoint_users_give_block_diagonal_counts() {
        let records = vec![rec("u1", &["a", "b"]), rec("u2", &["c", "d"])];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let u1 = m.user_id("u1").unwrap();
        let u2 = m.user_id("u2").unwrap();
        for tag in ["c", "d"] {
            assert_eq!(m.count(u1, m.hashtag_id(tag).unwrap()), 0);
        }
        for tag in ["a", "b"] {
            assert_eq!(m.count(u2, m.hashtag_id(tag).unwrap()), 0);
        }
    }

    #[test]
    fn aggregate_rejects_empty_input() {
        assert!(matches!(
            SharingMatrix::aggregate(&[], false),
            Err(Error::EmptyCorpus)
        ));
    }

    fn seeds(tags: &[&str]) -> SeedSet {
        SeedSet::new(tags.iter().map(|s| s.to_string()).collect(), None).unwrap()
    }

    #[test]
    fn filter_drops_hashtags_below_mean() {
        // Totals 10, 2, 3 -> mean 5: only the first survives. The single
        // user's total (15) meets the user mean (15).
        let records = vec![
            rec("u1", &["a"; 10]),
            rec("u1", &["b", "b"]),
            rec("u1", &["c", "c", "c"]),
        ];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let filtered = m.filter_low_engagement(&seeds(&["x", "y"])).unwrap();
        assert_eq!(filtered.hashtag_count(), 1);
        assert_eq!(filtered.hashtag_name(0), "a");
        assert_eq!(filtered.user_count(), 1);
        assert_eq!(filtered.user_total(0), 10);
    }

    #[test]
    fn filter_keeps_equal_totals() {
        let records = vec![rec("u1", &["a", "b"]), rec("u2", &["a", "b"])];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let filtered = m.filter_low_engagement(&seeds(&["x", "y"])).unwrap();
        assert_eq!(filtered.hashtag_count(), 2);
        assert_eq!(filtered.user_count(), 2);
    }

    #[test]
    fn filter_exempts_seeds_below_mean() {
        let records = vec![rec("u1", &["a"; 10]), rec("u1", &["s"])];
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let filtered = m.filter_low_engagement(&seeds(&["s", "other"])).unwrap();
        assert!(filtered.hashtag_id("s").is_some());
        assert!(filtered.hashtag_id("a").is_some());
    }

    #[test]
    fn filter_removing_everything_is_fatal() {
        // u1 holds the only above-mean hashtag but falls below the user
        // mean; u2 survives the user cut but shares only below-mean
        // hashtags. Nothing is left standing.
        let mut records = vec![rec("u1", &["a"; 100])];
        for j in 0..150 {
            let tag = format!("t{j}");
            records.push(rec("u2", &[&tag, &tag]));
        }
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let err = m.filter_low_engagement(&seeds(&["x", "y"])).unwrap_err();
        assert!(matches!(err, Error::EmptyAfterFilter { .. }));
    }

    #[test]
    fn filter_prunes_entities_left_without_shares() {
        // u2 passes the user threshold but every tag it shares sits
        // below the hashtag mean; u2 ends up with nothing and is pruned.
        // Hashtag b loses its only sharer (u1, below the user mean) and
        // is pruned as well.
        let mut records = vec![
            rec("u1", &["a"; 10]),
            rec("u1", &["b"; 10]),
            rec("u3", &["a"; 30]),
        ];
        for j in 0..15 {
            let tag = format!("t{j}");
            records.push(rec("u2", &[&tag, &tag]));
        }
        // Hashtag totals: a=40, b=10, t_j=2 (mean ~4.7); user totals:
        // u1=20, u3=30, u2=30 (mean ~26.7).
        let m = SharingMatrix::aggregate(&records, false).unwrap();
        let filtered = m.filter_low_engagement(&seeds(&["x", "y"])).unwrap();
        assert_eq!(filtered.user_count(), 1);
        assert_eq!(filtered.user_name(0), "u3");
        assert_eq!(filtered.hashtag_count(), 1);
        assert_eq!(filtered.hashtag_name(0), "a");
        assert_eq!(filtered.total_shares(), 30);
    }

    #[test]
    fn window_boundaries_are_half_open() {
        let mut r1 = rec("u1", &["a"]);
        r1.timestamp = Some(604800);
        let mut r2 = rec("u2", &["b"]);
        r2.timestamp = Some(604799);
        let wins = window(&[r1, r2], 604800, 0).unwrap();
        let indices: Vec<i64> = wins.iter().map(|(w, _)| *w).collect();
        assert_eq!(indices, vec![0, 1]);
        assert_eq!(wins[0].1[0].user, "u2");
        assert_eq!(wins[1].1[0].user, "u1");
    }

    #[test]
    fn four_weeks_of_records_span_four_windows() {
        let day = 86400;
        let records: Vec<PostRecord> = (0..28)
            .map(|d| {
                let mut r = rec(&format!("u{d}"), &["a"]);
                r.timestamp = Some(d * day);
                r
            })
            .collect();
        let wins = window(&records, 7 * day as u64, 0).unwrap();
        let indices: Vec<i64> = wins.iter().map(|(w, _)| *w).collect();
        assert_eq!(indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn window_requires_timestamps() {
        let err = window(&[rec("u1", &["a"])], 60, 0).unwrap_err();
        assert!(matches!(err, Error::MissingTimestamp { .. }));
    }

    /// Flatten a matrix into (user name, hashtag name) -> count, which is
    /// what aggregation order must not affect.
    fn logical_view(m: &SharingMatrix) -> BTreeMap<(String, String), u64> {
        let mut view = BTreeMap::new();
        for k in 0..m.user_count() {
            let (cols, counts) = m.user_row(k);
            for (&i, &c) in cols.iter().zip(counts) {
                view.insert(
                    (
                        m.user_name(k).to_string(),
                        m.hashtag_name(i as usize).to_string(),
                    ),
                    c as u64,
                );
            }
        }
        view
    }

    proptest! {
        #[test]
        fn aggregate_is_permutation_invariant(
            raw in proptest::collection::vec(
                (0usize..5, proptest::collection::vec(0usize..6, 1..4)),
                1..20,
            ),
            seed in 0u64..1000,
        ) {
            let records: Vec<PostRecord> = raw
                .iter()
                .map(|(u, tags)| {
                    rec(
                        &format!("u{u}"),
                        &tags.iter().map(|t| ["a","b","c","d","e","f"][*t]).collect::<Vec<_>>(),
                    )
                })
                .collect();
            let mut shuffled = records.clone();
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            shuffled.shuffle(&mut rng);

            let a = SharingMatrix::aggregate(&records, false).unwrap();
            let b = SharingMatrix::aggregate(&shuffled, false).unwrap();
            prop_assert_eq!(logical_view(&a), logical_view(&b));
        }

        #[test]
        fn marginal_sums_equal_total_multiplicity(
            raw in proptest::collection::vec(
                (0usize..4, proptest::collection::vec(0usize..5, 1..4)),
                1..15,
            ),
        ) {
            let records: Vec<PostRecord> = raw
                .iter()
                .map(|(u, tags)| {
                    rec(
                        &format!("u{u}"),
                        &tags.iter().map(|t| ["a","b","c","d","e"][*t]).collect::<Vec<_>>(),
                    )
                })
                .collect();
            let total: u64 = records.iter().map(|r| r.hashtags.len() as u64).sum();
            let m = SharingMatrix::aggregate(&records, false).unwrap();
            prop_assert_eq!(m.hashtag_totals().iter().sum::<u64>(), total);
            prop_assert_eq!(m.user_totals().iter().sum::<u64>(), total);
        }

        #[test]
        fn window_partitions_records(
            stamps in proptest::collection::vec(-1000i64..1000, 1..30),
            length in 1u64..50,
            origin in -100i64..100,
        ) {
            let records: Vec<PostRecord> = stamps
                .iter()
                .enumerate()
                .map(|(i, ts)| {
                    let mut r = rec(&format!("u{i}"), &["a"]);
                    r.timestamp = Some(*ts);
                    r
                })
                .collect();
            let wins = window(&records, length, origin).unwrap();
            let total: usize = wins.iter().map(|(_, rs)| rs.len()).sum();
            prop_assert_eq!(total, records.len());
            for (w, rs) in &wins {
                for r in rs {
                    let ts = r.timestamp.unwrap();
                    let start = origin + w * length as i64;
                    prop_assert!(ts >= start && ts < start + length as i64);
                }
            }
        }
    }
}
