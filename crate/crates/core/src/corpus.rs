//! Time-stamped document store with conjunctive term retrieval and query
//! broadening.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Datelike, Duration, NaiveDate, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

/// Minimum result count before a query stops broadening.
pub const DEFAULT_MIN_RESULTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Article,
    Blog,
    VideoTranscript,
    PodcastTranscript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source_kind: SourceKind,
    pub source_name: String,
    pub published_at: DateTime<Utc>,
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::invalid("document id is empty"));
        }
        if self.body.trim().is_empty() {
            return Err(Error::invalid(format!("document {} has an empty body", self.id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// Position of the record in its batch (line number for files, 1-based).
    pub record: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Distinct ids newly stored or replaced by the batch.
    pub stored: usize,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug)]
struct IndexedDocument {
    doc: Document,
    title_tokens: Vec<String>,
    body_tokens: Vec<String>,
}

impl IndexedDocument {
    fn new(doc: Document) -> Self {
        IndexedDocument {
            title_tokens: text::words(&doc.title),
            body_tokens: text::words(&doc.body),
            doc,
        }
    }

    fn contains_term(&self, term: &[String]) -> bool {
        contains_sequence(&self.title_tokens, term) || contains_sequence(&self.body_tokens, term)
    }
}

fn contains_sequence(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Document collection keyed by id.
///
/// Cloning is cheap and yields an immutable snapshot: later ingestion into the
/// original store never affects a clone taken earlier.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    docs: Arc<BTreeMap<String, Arc<IndexedDocument>>>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.docs.get(id).map(|d| &d.doc)
    }

    /// Documents in id order.
    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.values().map(|d| &d.doc)
    }

    pub fn snapshot(&self) -> CorpusStore {
        self.clone()
    }

    /// Ingests a batch. Invalid documents are rejected individually; an id that
    /// is already stored is replaced, and within a batch the last record wins.
    pub fn ingest<I>(&mut self, documents: I) -> IngestReport
    where
        I: IntoIterator<Item = Document>,
    {
        self.ingest_records(documents.into_iter().map(Ok))
    }

    /// Like [`ingest`](Self::ingest) but accepts records that already failed
    /// to parse; those are reported as rejections.
    pub fn ingest_records<I>(&mut self, records: I) -> IngestReport
    where
        I: IntoIterator<Item = std::result::Result<Document, String>>,
    {
        let mut report = IngestReport::default();
        let mut batch: BTreeMap<String, Document> = BTreeMap::new();
        for (i, record) in records.into_iter().enumerate() {
            let outcome = record.and_then(|doc| match doc.validate() {
                Ok(()) => Ok(doc),
                Err(e) => Err(e.to_string()),
            });
            match outcome {
                Ok(doc) => {
                    batch.insert(doc.id.clone(), doc);
                }
                Err(reason) => report.rejected.push(Rejection {
                    record: i + 1,
                    reason,
                }),
            }
        }
        report.stored = batch.len();
        if !batch.is_empty() {
            let docs = Arc::make_mut(&mut self.docs);
            for (id, doc) in batch {
                docs.insert(id, Arc::new(IndexedDocument::new(doc)));
            }
        }
        report
    }

    /// Loads newline-delimited JSON records, skipping blank lines.
    pub fn load(path: impl AsRef<Path>) -> Result<(CorpusStore, IngestReport)> {
        let mut store = CorpusStore::new();
        let report = store.ingest_file(path)?;
        Ok((store, report))
    }

    pub fn ingest_file(&mut self, path: impl AsRef<Path>) -> Result<IngestReport> {
        let reader = BufReader::new(File::open(path)?);
        let mut records = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str::<Document>(&line).map_err(|e| e.to_string()));
        }
        Ok(self.ingest_records(records))
    }

    /// Serializes the store as newline-delimited JSON in id order.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        for doc in self.documents() {
            serde_json::to_writer(&mut out, doc)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// Ids of documents matching every term of `level` inside `range`.
    fn matching(&self, level: &[Vec<String>], range: Option<(DateTime<Utc>, DateTime<Utc>)>) -> Vec<&IndexedDocument> {
        self.docs
            .values()
            .filter(|d| match range {
                Some((start, end)) => d.doc.published_at >= start && d.doc.published_at <= end,
                None => true,
            })
            .filter(|d| level.iter().all(|term| d.contains_term(term)))
            .map(|d| d.as_ref())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Query plans
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    /// Term conjunctions, most specific first.
    pub levels: Vec<Vec<String>>,
    pub min_results: usize,
    pub time_range: Option<(DateTime<Utc>, DateTime<Utc>)>,
}

impl QueryPlan {
    pub fn with_time_range(mut self, window: &WeekWindow) -> Self {
        self.time_range = Some((window.start, window.end));
        self
    }

    pub fn with_min_results(mut self, min_results: usize) -> Self {
        self.min_results = min_results;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::invalid("query plan has no levels"));
        }
        if self.min_results == 0 {
            return Err(Error::invalid("min_results must be at least 1"));
        }
        for pair in self.levels.windows(2) {
            let earlier: BTreeSet<String> = pair[0].iter().map(|t| text::normalize_phrase(t)).collect();
            let later: BTreeSet<String> = pair[1].iter().map(|t| text::normalize_phrase(t)).collect();
            if !(later.is_subset(&earlier) && later.len() < earlier.len()) {
                return Err(Error::invalid(format!(
                    "level {:?} is not a strict subset of {:?}",
                    pair[1], pair[0]
                )));
            }
        }
        if let Some((start, end)) = self.time_range {
            if end < start {
                return Err(Error::invalid("time range ends before it starts"));
            }
        }
        Ok(())
    }
}

/// Builds the broadening ladder: player, team and every league term first,
/// then drop trailing league terms one at a time, and finally keep only the
/// player and the first league term.
pub fn build_query_plan(player_name: &str, team_name: &str, league_terms: &[String]) -> Result<QueryPlan> {
    if player_name.trim().is_empty() {
        return Err(Error::invalid("player name is empty"));
    }
    let mut head = vec![player_name.to_string()];
    if !team_name.trim().is_empty() {
        head.push(team_name.to_string());
    }
    let mut levels: Vec<Vec<String>> = Vec::new();
    for keep in (1..=league_terms.len()).rev() {
        let mut level = head.clone();
        level.extend(league_terms[..keep].iter().cloned());
        levels.push(level);
    }
    if league_terms.is_empty() {
        levels.push(head);
    } else {
        levels.push(vec![player_name.to_string(), league_terms[0].clone()]);
    }
    levels.dedup();
    Ok(QueryPlan {
        levels,
        min_results: DEFAULT_MIN_RESULTS,
        time_range: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOutcome {
    /// Matches sorted newest first (ties by id).
    pub documents: Vec<Document>,
    /// Index of the level that produced `documents`.
    pub level: usize,
    /// Whether that level reached `min_results`.
    pub threshold_met: bool,
}

/// Evaluates levels in order and stops at the first with at least
/// `min_results` matches. If none reaches it, the largest result set wins,
/// ties going to the broadest level.
pub fn execute_with_broadening(plan: &QueryPlan, store: &CorpusStore) -> Result<QueryOutcome> {
    plan.validate()?;
    let mut best: Option<(usize, Vec<&IndexedDocument>)> = None;
    for (i, level) in plan.levels.iter().enumerate() {
        let terms: Vec<Vec<String>> = level.iter().map(|t| text::words(t)).collect();
        let found = store.matching(&terms, plan.time_range);
        if found.len() >= plan.min_results {
            return Ok(outcome(i, found, true));
        }
        if best.as_ref().is_none_or(|(_, b)| found.len() >= b.len()) {
            best = Some((i, found));
        }
    }
    let (level, found) = best.expect("plan has at least one level");
    Ok(outcome(level, found, false))
}

fn outcome(level: usize, mut found: Vec<&IndexedDocument>, threshold_met: bool) -> QueryOutcome {
    found.sort_by(|a, b| {
        b.doc
            .published_at
            .cmp(&a.doc.published_at)
            .then_with(|| a.doc.id.cmp(&b.doc.id))
    });
    QueryOutcome {
        documents: found.into_iter().map(|d| d.doc.clone()).collect(),
        level,
        threshold_met,
    }
}

// ---------------------------------------------------------------------------
// Week windows
// ---------------------------------------------------------------------------

/// A Tuesday-to-Monday scoring week.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekWindow {
    pub season_week: u32,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl WeekWindow {
    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        t >= self.start && t <= self.end
    }
}

pub fn week_window(season_start: NaiveDate, week: u32) -> Result<WeekWindow> {
    if week < 1 {
        return Err(Error::invalid("week must be at least 1"));
    }
    if season_start.weekday() != Weekday::Tue {
        return Err(Error::invalid(format!("season start {season_start} is not a Tuesday")));
    }
    let day = season_start + Duration::days(7 * (i64::from(week) - 1));
    let start = day.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc();
    let end = start + Duration::days(6) + Duration::hours(23) + Duration::minutes(59) + Duration::seconds(59);
    Ok(WeekWindow {
        season_week: week,
        start,
        end,
    })
}

/// Season week containing `t`, if it falls on or after the season start.
pub fn week_of(season_start: NaiveDate, t: DateTime<Utc>) -> Option<u32> {
    let days = (t.date_naive() - season_start).num_days();
    (days >= 0).then(|| (days / 7) as u32 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn doc(id: &str, day: u32, body: &str) -> Document {
        Document {
            id: id.into(),
            source_kind: SourceKind::Article,
            source_name: "wire".into(),
            published_at: Utc.with_ymd_and_hms(2018, 9, day, 12, 0, 0).unwrap(),
            title: String::new(),
            body: body.into(),
        }
    }

    fn terms(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ingest_empty_stream() {
        let mut store = CorpusStore::new();
        assert_eq!(store.ingest(Vec::new()).stored, 0);
        assert!(store.is_empty());
    }

    #[test]
    fn ingest_rejects_empty_body() {
        let mut store = CorpusStore::new();
        let report = store.ingest(vec![doc("a", 5, "x"), doc("b", 5, "y"), doc("c", 5, "  "), doc("d", 5, "z")]);
        assert_eq!(report.stored, 3);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].record, 3);
        assert_eq!(store.len(), 3);
    }

    #[test]
    fn reingest_replaces_by_id() {
        let mut store = CorpusStore::new();
        assert_eq!(store.ingest(vec![doc("a", 5, "x")]).stored, 1);
        assert_eq!(store.ingest(vec![doc("a", 5, "x")]).stored, 1);
        assert_eq!(store.len(), 1);
        // last wins within one batch
        let report = store.ingest(vec![doc("b", 5, "first"), doc("b", 5, "second")]);
        assert_eq!(report.stored, 1);
        assert_eq!(store.get("b").unwrap().body, "second");
    }

    #[test]
    fn snapshot_is_isolated_from_later_ingest() {
        let mut store = CorpusStore::new();
        store.ingest(vec![doc("a", 5, "x")]);
        let snap = store.snapshot();
        store.ingest(vec![doc("b", 5, "y")]);
        assert_eq!(snap.len(), 1);
        assert_eq!(store.len(), 2);
    }

    #[test]
    fn plan_levels_follow_broadening_ladder() {
        let plan = build_query_plan("Tom Brady", "Patriots", &terms(&["NFL", "Football"])).unwrap();
        assert_eq!(
            plan.levels,
            vec![
                terms(&["Tom Brady", "Patriots", "NFL", "Football"]),
                terms(&["Tom Brady", "Patriots", "NFL"]),
                terms(&["Tom Brady", "NFL"]),
            ]
        );
        assert_eq!(plan.min_results, 50);
        plan.validate().unwrap();

        let plan = build_query_plan("X", "Y", &[]).unwrap();
        assert_eq!(plan.levels, vec![terms(&["X", "Y"])]);

        let plan = build_query_plan("A", "B", &terms(&["L1"])).unwrap();
        assert_eq!(plan.levels, vec![terms(&["A", "B", "L1"]), terms(&["A", "L1"])]);

        assert!(matches!(build_query_plan(" ", "B", &[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn plan_validation_rejects_non_subset_levels() {
        let plan = QueryPlan {
            levels: vec![terms(&["a", "b"]), terms(&["c"])],
            min_results: 1,
            time_range: None,
        };
        assert!(plan.validate().is_err());
        let plan = QueryPlan {
            levels: vec![terms(&["a"])],
            min_results: 0,
            time_range: None,
        };
        assert!(plan.validate().is_err());
    }

    #[test]
    fn matching_is_whole_token_and_case_insensitive() {
        let mut store = CorpusStore::new();
        store.ingest(vec![
            doc("1", 5, "TOM BRADY and the patriots"),
            doc("2", 5, "Tom Bradyish patriots"),
            doc("3", 5, "Brady Tom patriots"),
        ]);
        let plan = QueryPlan {
            levels: vec![terms(&["tom brady", "Patriots"])],
            min_results: 1,
            time_range: None,
        };
        let out = execute_with_broadening(&plan, &store).unwrap();
        let ids: Vec<_> = out.documents.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["1"]);
    }

    #[test]
    fn results_sorted_newest_first_and_time_filtered() {
        let mut store = CorpusStore::new();
        store.ingest(vec![doc("a", 5, "brady"), doc("b", 7, "brady"), doc("c", 20, "brady")]);
        let window = week_window(NaiveDate::from_ymd_opt(2018, 9, 4).unwrap(), 1).unwrap();
        let plan = QueryPlan {
            levels: vec![terms(&["brady"])],
            min_results: 1,
            time_range: None,
        }
        .with_time_range(&window);
        let out = execute_with_broadening(&plan, &store).unwrap();
        let ids: Vec<_> = out.documents.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["b", "a"]);
    }

    #[test]
    fn week_windows() {
        let s = NaiveDate::from_ymd_opt(2018, 9, 4).unwrap();
        let w1 = week_window(s, 1).unwrap();
        assert_eq!(w1.start, Utc.with_ymd_and_hms(2018, 9, 4, 0, 0, 0).unwrap());
        assert_eq!(w1.end, Utc.with_ymd_and_hms(2018, 9, 10, 23, 59, 59).unwrap());
        let w2 = week_window(s, 2).unwrap();
        assert_eq!(w2.start.date_naive(), NaiveDate::from_ymd_opt(2018, 9, 11).unwrap());
        assert_eq!(w2.start.weekday(), Weekday::Tue);
        assert_eq!(w2.end.date_naive(), NaiveDate::from_ymd_opt(2018, 9, 17).unwrap());
        assert_eq!(w2.end.weekday(), Weekday::Mon);
        assert!(week_window(s, 0).is_err());
        assert!(week_window(NaiveDate::from_ymd_opt(2018, 9, 5).unwrap(), 1).is_err());
        for k in 1..17 {
            let a = week_window(s, k).unwrap();
            let b = week_window(s, k + 1).unwrap();
            assert_eq!(b.start - a.start, Duration::days(7));
            assert_eq!(a.end - a.start, Duration::days(7) - Duration::seconds(1));
        }
        assert_eq!(week_of(s, w2.end), Some(2));
        assert_eq!(week_of(s, w1.start - Duration::seconds(1)), None);
    }
}
