//! Dictionary pre-annotation over the 13-type entity ontology, token-level
//! inter-annotator agreement, and span precision/recall scoring.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, Document};
use crate::error::{Error, Result};
use crate::text::{self, Token};

/// Closed entity ontology. Declaration order breaks ties between equal-length
/// dictionary matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityType {
    BodyPart,
    Coach,
    Fans,
    Gear,
    Injury,
    Location,
    Player,
    PlayerStatus,
    Treatment,
    PositiveTone,
    NegativeTone,
    Team,
    PerformanceMetric,
}

impl EntityType {
    pub const ALL: [EntityType; 13] = [
        EntityType::BodyPart,
        EntityType::Coach,
        EntityType::Fans,
        EntityType::Gear,
        EntityType::Injury,
        EntityType::Location,
        EntityType::Player,
        EntityType::PlayerStatus,
        EntityType::Treatment,
        EntityType::PositiveTone,
        EntityType::NegativeTone,
        EntityType::Team,
        EntityType::PerformanceMetric,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::BodyPart => "body_part",
            EntityType::Coach => "coach",
            EntityType::Fans => "fans",
            EntityType::Gear => "gear",
            EntityType::Injury => "injury",
            EntityType::Location => "location",
            EntityType::Player => "player",
            EntityType::PlayerStatus => "player_status",
            EntityType::Treatment => "treatment",
            EntityType::PositiveTone => "positive_tone",
            EntityType::NegativeTone => "negative_tone",
            EntityType::Team => "team",
            EntityType::PerformanceMetric => "performance_metric",
        }
    }

    /// Types whose surfaces count as document concepts.
    pub fn is_concept(self) -> bool {
        matches!(
            self,
            EntityType::PerformanceMetric | EntityType::Injury | EntityType::PlayerStatus | EntityType::Treatment
        )
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityType::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown entity type {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntitySpan {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub entity_type: EntityType,
    pub surface: String,
}

impl EntitySpan {
    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.doc_id == other.doc_id && self.start < other.end && other.start < self.end
    }

    /// Checks offsets and surface against the document body.
    pub fn validate_against(&self, doc: &Document) -> Result<()> {
        if self.end <= self.start {
            return Err(Error::invalid(format!("span [{}, {}) is empty", self.start, self.end)));
        }
        let surface = text::char_slice(&doc.body, self.start, self.end);
        if surface.chars().count() != self.end - self.start || surface != self.surface {
            return Err(Error::invalid(format!(
                "span [{}, {}) of {} does not match its surface {:?}",
                self.start, self.end, doc.id, self.surface
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    pub entity_type: EntityType,
    terms: BTreeSet<String>,
}

impl Dictionary {
    pub fn new<I, S>(entity_type: EntityType, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut dict = Dictionary {
            entity_type,
            terms: BTreeSet::new(),
        };
        for term in terms {
            dict.insert(term.as_ref())?;
        }
        Ok(dict)
    }

    pub fn insert(&mut self, phrase: &str) -> Result<()> {
        let norm = text::normalize_phrase(phrase);
        if norm.is_empty() {
            return Err(Error::invalid(format!("empty dictionary phrase {phrase:?}")));
        }
        self.terms.insert(norm);
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Parses `entity_type<TAB>phrase` lines into one dictionary per type, in
/// ontology order.
pub fn parse_dictionaries(input: &str) -> Result<Vec<Dictionary>> {
    let mut by_type: BTreeMap<EntityType, Dictionary> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, phrase) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(format!("line {}", i + 1), "expected entity_type<TAB>phrase"))?;
        let kind: EntityType = kind.parse().map_err(|e: Error| Error::parse(format!("line {}", i + 1), e.to_string()))?;
        by_type
            .entry(kind)
            .or_insert_with(|| Dictionary {
                entity_type: kind,
                terms: BTreeSet::new(),
            })
            .insert(phrase)
            .map_err(|e| Error::parse(format!("line {}", i + 1), e.to_string()))?;
    }
    Ok(by_type.into_values().collect())
}

pub fn load_dictionaries(path: impl AsRef<Path>) -> Result<Vec<Dictionary>> {
    parse_dictionaries(&fs::read_to_string(path)?)
}

pub fn format_dictionaries(dictionaries: &[Dictionary]) -> String {
    let mut out = String::new();
    for dict in dictionaries {
        for term in dict.terms() {
            out.push_str(dict.entity_type.as_str());
            out.push('\t');
            out.push_str(term);
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Annotation
// ---------------------------------------------------------------------------

/// Greedy longest-match phrase annotator.
#[derive(Debug, Clone, Default)]
pub struct DictionaryAnnotator {
    phrases: HashMap<String, EntityType>,
    max_tokens: usize,
}

impl DictionaryAnnotator {
    pub fn new(dictionaries: &[Dictionary]) -> Self {
        let mut phrases: HashMap<String, EntityType> = HashMap::new();
        let mut max_tokens = 0;
        for dict in dictionaries {
            for term in dict.terms() {
                max_tokens = max_tokens.max(term.split(' ').count());
                phrases
                    .entry(term.to_string())
                    .and_modify(|t| *t = (*t).min(dict.entity_type))
                    .or_insert(dict.entity_type);
            }
        }
        DictionaryAnnotator { phrases, max_tokens }
    }

    pub fn annotate(&self, doc: &Document) -> Vec<EntitySpan> {
        let tokens = text::tokenize(&doc.body);
        let chars: Vec<char> = doc.body.chars().collect();
        let mut spans = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_match(&tokens[i..]) {
                Some((len, entity_type)) => {
                    let (start, end) = (tokens[i].start, tokens[i + len - 1].end);
                    spans.push(EntitySpan {
                        doc_id: doc.id.clone(),
                        start,
                        end,
                        entity_type,
                        surface: chars[start..end].iter().collect(),
                    });
                    i += len;
                }
                None => i += 1,
            }
        }
        spans
    }

    fn longest_match(&self, tokens: &[Token]) -> Option<(usize, EntityType)> {
        let limit = self.max_tokens.min(tokens.len());
        let mut key = String::new();
        let mut best = None;
        for (len, tok) in tokens[..limit].iter().enumerate() {
            if len > 0 {
                key.push(' ');
            }
            key.push_str(&tok.text);
            if let Some(&t) = self.phrases.get(&key) {
                best = Some((len + 1, t));
            }
        }
        best
    }
}

pub fn annotate(doc: &Document, dictionaries: &[Dictionary]) -> Vec<EntitySpan> {
    DictionaryAnnotator::new(dictionaries).annotate(doc)
}

// ---------------------------------------------------------------------------
// Span files
// ---------------------------------------------------------------------------

/// Formats spans as `doc_id<TAB>start<TAB>end<TAB>entity_type` lines.
pub fn format_spans(spans: &[EntitySpan]) -> String {
    let mut out = String::new();
    for s in spans {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", s.doc_id, s.start, s.end, s.entity_type));
    }
    out
}

/// Parses span lines, recovering each surface from the referenced document.
pub fn parse_spans(input: &str, store: &CorpusStore) -> Result<Vec<EntitySpan>> {
    let mut spans = Vec::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let loc = || format!("line {}", i + 1);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(loc(), "expected doc_id, start, end, entity_type"));
        }
        let doc = store
            .get(fields[0])
            .ok_or_else(|| Error::parse(loc(), format!("unknown document {}", fields[0])))?;
        let start: usize = fields[1].parse().map_err(|_| Error::parse(loc(), "bad start offset"))?;
        let end: usize = fields[2].parse().map_err(|_| Error::parse(loc(), "bad end offset"))?;
        let entity_type: EntityType = fields[3].parse().map_err(|e: Error| Error::parse(loc(), e.to_string()))?;
        let span = EntitySpan {
            doc_id: doc.id.clone(),
            start,
            end,
            entity_type,
            surface: text::char_slice(&doc.body, start, end),
        };
        span.validate_against(doc).map_err(|e| Error::parse(loc(), e.to_string()))?;
        spans.push(span);
    }
    Ok(spans)
}

pub fn load_spans(path: impl AsRef<Path>, store: &CorpusStore) -> Result<Vec<EntitySpan>> {
    parse_spans(&fs::read_to_string(path)?, store)
}

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

/// Square contingency table of category assignments (rows: annotator A).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    counts: Vec<Vec<u64>>,
}

impl Contingency {
    pub fn new(categories: usize) -> Self {
        Contingency {
            counts: vec![vec![0; categories]; categories],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::invalid("contingency table must be square and non-empty"));
        }
        Ok(Contingency { counts: rows })
    }

    pub fn add(&mut self, a: usize, b: usize) {
        self.counts[a][b] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Cohen's kappa. Evaluated as an integer ratio
    /// `(N·agree − Σ rᵢcᵢ) / (N² − Σ rᵢcᵢ)` so small tables are exact.
    pub fn kappa(&self) -> Result<f64> {
        let k = self.counts.len();
        let n = self.total() as i128;
        if n == 0 {
            return Err(Error::EmptySample("no tokens to compare".into()));
        }
        let agree: i128 = (0..k).map(|i| self.counts[i][i] as i128).sum();
        let chance: i128 = (0..k)
            .map(|i| {
                let row: u64 = self.counts[i].iter().sum();
                let col: u64 = self.counts.iter().map(|r| r[i]).sum();
                row as i128 * col as i128
            })
            .sum();
        let denom = n * n - chance;
        if denom == 0 {
            return if agree == n { Ok(1.0) } else { Err(Error::DegenerateMarginals) };
        }
        Ok((n * agree - chance) as f64 / denom as f64)
    }

    /// Type-vs-rest reduction of a table over `EntityType::ALL` + none.
    fn binary(&self, category: usize) -> Contingency {
        let mut out = Contingency::new(2);
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let a = usize::from(i != category);
                let b = usize::from(j != category);
                out.counts[a][b] += c;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub overall: f64,
    pub per_type: BTreeMap<EntityType, f64>,
    pub tokens: u64,
}

const NONE_CATEGORY: usize = 13;

fn token_categories(doc: &Document, spans: &[&EntitySpan]) -> Vec<usize> {
    text::tokenize(&doc.body)
        .iter()
        .map(|tok| {
            spans
                .iter()
                .find(|s| s.start < tok.end && tok.start < s.end)
                .map_or(NONE_CATEGORY, |s| s.entity_type.index())
        })
        .collect()
}

fn group_by_doc(spans: &[EntitySpan]) -> HashMap<&str, Vec<&EntitySpan>> {
    let mut map: HashMap<&str, Vec<&EntitySpan>> = HashMap::new();
    for s in spans {
        map.entry(s.doc_id.as_str()).or_default().push(s);
    }
    map
}

/// Token-level agreement between two annotation passes over `docs`.
pub fn cohen_kappa<'a, I>(a: &[EntitySpan], b: &[EntitySpan], docs: I) -> Result<KappaReport>
where
    I: IntoIterator<Item = &'a Document>,
{
    let (by_a, by_b) = (group_by_doc(a), group_by_doc(b));
    let mut table = Contingency::new(NONE_CATEGORY + 1);
    for doc in docs {
        let empty = Vec::new();
        let cat_a = token_categories(doc, by_a.get(doc.id.as_str()).unwrap_or(&empty));
        let cat_b = token_categories(doc, by_b.get(doc.id.as_str()).unwrap_or(&empty));
        for (x, y) in cat_a.into_iter().zip(cat_b) {
            table.add(x, y);
        }
    }
    let overall = table.kappa()?;
    let mut per_type = BTreeMap::new();
    for t in EntityType::ALL {
        per_type.insert(t, table.binary(t.index()).kappa()?);
    }
    Ok(KappaReport {
        overall,
        per_type,
        tokens: table.total(),
    })
}

// ---------------------------------------------------------------------------
// Precision / recall
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    Exact,
    Overlap,
}

impl FromStr for MatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MatchMode::Exact),
            "overlap" => Ok(MatchMode::Overlap),
            other => Err(Error::invalid(format!("unknown match mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Prf {
    fn from_counts(tp: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
            true_positives: tp,
            predicted,
            gold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanEvaluation {
    pub overall: Prf,
    pub per_type: BTreeMap<EntityType, Prf>,
}

/// Scores predicted spans against gold spans. Each gold span is matched at
/// most once; in overlap mode predictions claim the first unmatched
/// same-type gold span they overlap, in span order.
pub fn evaluate(pred: &[EntitySpan], gold: &[EntitySpan], mode: MatchMode) -> SpanEvaluation {
    let mut pred_sorted: Vec<&EntitySpan> = pred.iter().collect();
    pred_sorted.sort();
    let mut gold_sorted: Vec<&EntitySpan> = gold.iter().collect();
    gold_sorted.sort();

    let mut used = vec![false; gold_sorted.len()];
    let mut tp_by_type: BTreeMap<EntityType, usize> = BTreeMap::new();
    for p in &pred_sorted {
        let hit = gold_sorted.iter().enumerate().position(|(j, g)| {
            !used[j]
                && g.entity_type == p.entity_type
                && match mode {
                    MatchMode::Exact => g.doc_id == p.doc_id && g.start == p.start && g.end == p.end,
                    MatchMode::Overlap => g.overlaps(p),
                }
        });
        if let Some(j) = hit {
            used[j] = true;
            *tp_by_type.entry(p.entity_type).or_default() += 1;
        }
    }

    let count = |spans: &[&EntitySpan], t: EntityType| spans.iter().filter(|s| s.entity_type == t).count();
    let mut per_type = BTreeMap::new();
    for t in EntityType::ALL {
        let (np, ng) = (count(&pred_sorted, t), count(&gold_sorted, t));
        if np + ng > 0 {
            per_type.insert(t, Prf::from_counts(tp_by_type.get(&t).copied().unwrap_or(0), np, ng));
        }
    }
    let tp = tp_by_type.values().sum();
    SpanEvaluation {
        overall: Prf::from_counts(tp, pred.len(), gold.len()),
        per_type,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceKind;
    use chrono::{TimeZone, Utc};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn doc(id: &str, body: &str) -> Document {
        Document {
            id: id.into(),
            source_kind: SourceKind::Article,
            source_name: "test".into(),
            published_at: Utc.with_ymd_and_hms(2018, 9, 5, 0, 0, 0).unwrap(),
            title: String::new(),
            body: body.into(),
        }
    }

    fn span(doc_id: &str, start: usize, end: usize, t: EntityType) -> EntitySpan {
        EntitySpan {
            doc_id: doc_id.into(),
            start,
            end,
            entity_type: t,
            surface: String::new(),
        }
    }

    /// Every dictionary match at every token position, then the greedy
    /// maximal non-overlapping selection by (start asc, length desc, type).
    fn brute_force_annotate(d: &Document, dicts: &[Dictionary]) -> Vec<EntitySpan> {
        let toks = text::tokenize(&d.body);
        let mut candidates = Vec::new();
        for i in 0..toks.len() {
            for j in i..toks.len() {
                let phrase: Vec<&str> = toks[i..=j].iter().map(|t| t.text.as_str()).collect();
                let phrase = phrase.join(" ");
                for dict in dicts {
                    if dict.terms().any(|t| t == phrase) {
                        candidates.push((toks[i].start, toks[j].end, dict.entity_type));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
        let mut out: Vec<EntitySpan> = Vec::new();
        for (s, e, t) in candidates {
            if out.last().is_none_or(|l| l.end <= s) {
                out.push(EntitySpan {
                    doc_id: d.id.clone(),
                    start: s,
                    end: e,
                    entity_type: t,
                    surface: text::char_slice(&d.body, s, e),
                });
            }
        }
        out
    }

    #[test]
    fn single_player_match() {
        let dicts = vec![Dictionary::new(EntityType::Player, ["Tom Brady"]).unwrap()];
        let spans = annotate(&doc("d", "Tom Brady threw"), &dicts);
        assert_eq!(spans.len(), 1);
        assert_eq!((spans[0].start, spans[0].end), (0, 9));
        assert_eq!(spans[0].surface, "Tom Brady");
        assert_eq!(spans[0].entity_type, EntityType::Player);
    }

    #[test]
    fn longest_match_wins() {
        let dicts = vec![Dictionary::new(EntityType::Team, ["patriots", "new england patriots"]).unwrap()];
        let d = doc("d", "New England Patriots");
        let spans = annotate(&d, &dicts);
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].surface, "New England Patriots");
        assert_eq!(spans, brute_force_annotate(&d, &dicts));
    }

    #[test]
    fn equal_length_ties_use_declaration_order() {
        let dicts = vec![
            Dictionary::new(EntityType::PlayerStatus, ["questionable"]).unwrap(),
            Dictionary::new(EntityType::Injury, ["questionable"]).unwrap(),
        ];
        let spans = annotate(&doc("d", "listed as questionable"), &dicts);
        assert_eq!(spans[0].entity_type, EntityType::Injury);
    }

    #[test]
    fn empty_dictionaries_annotate_nothing() {
        assert!(annotate(&doc("d", "Tom Brady threw"), &[]).is_empty());
        assert!(Dictionary::new(EntityType::Gear, ["  "]).is_err());
    }

    #[test]
    fn random_corpora_match_brute_force() {
        let vocab = ["tom", "brady", "new", "england", "patriots", "knee", "sprain", "out", "big", "game"];
        let dicts = vec![
            Dictionary::new(EntityType::Player, ["tom brady", "brady"]).unwrap(),
            Dictionary::new(EntityType::Team, ["patriots", "new england patriots", "new england"]).unwrap(),
            Dictionary::new(EntityType::Injury, ["knee sprain", "sprain"]).unwrap(),
            Dictionary::new(EntityType::BodyPart, ["knee"]).unwrap(),
            Dictionary::new(EntityType::PositiveTone, ["big game"]).unwrap(),
            Dictionary::new(EntityType::PlayerStatus, ["out"]).unwrap(),
        ];
        let annotator = DictionaryAnnotator::new(&dicts);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..200 {
            let n = rng.random_range(1..30);
            let body: Vec<&str> = (0..n).map(|_| vocab[rng.random_range(0..vocab.len())]).collect();
            let d = doc(&format!("d{k}"), &body.join(if k % 2 == 0 { " " } else { ", " }));
            let spans = annotator.annotate(&d);
            assert_eq!(spans, brute_force_annotate(&d, &dicts));
            for w in spans.windows(2) {
                assert!(w[0].end <= w[1].start);
            }
            for s in &spans {
                s.validate_against(&d).unwrap();
            }
            assert_eq!(spans, annotator.annotate(&d));
        }
    }

    #[test]
    fn dictionary_file_round_trip() {
        let dicts = parse_dictionaries("team\tNew England Patriots\nplayer\tTom Brady\n\nteam\tRams\n").unwrap();
        assert_eq!(dicts.len(), 2);
        assert_eq!(dicts[0].entity_type, EntityType::Player);
        assert_eq!(dicts[1].terms().collect::<Vec<_>>(), ["new england patriots", "rams"]);
        assert_eq!(parse_dictionaries(&format_dictionaries(&dicts)).unwrap(), dicts);
        assert!(parse_dictionaries("wizard\tmerlin\n").is_err());
        assert!(parse_dictionaries("team no tab\n").is_err());
    }

    #[test]
    fn kappa_contingency_fixture_is_exact() {
        let table = Contingency::from_rows(vec![vec![20, 5], vec![10, 15]]).unwrap();
        assert_eq!(table.kappa().unwrap(), 0.4);
    }

    #[test]
    fn kappa_degenerate_marginals() {
        let same = Contingency::from_rows(vec![vec![10, 0], vec![0, 0]]).unwrap();
        assert_eq!(same.kappa().unwrap(), 1.0);
        assert!(Contingency::new(2).kappa().is_err());
    }

    #[test]
    fn kappa_identical_annotations() {
        let d = doc("d", "Tom Brady hurt his knee against the Rams");
        let a = vec![span("d", 0, 9, EntityType::Player), span("d", 19, 23, EntityType::BodyPart)];
        let report = cohen_kappa(&a, &a, [&d]).unwrap();
        assert_eq!(report.overall, 1.0);
        assert!(report.per_type.values().all(|&k| k == 1.0));
        assert_eq!(report.tokens, 8);
    }

    #[test]
    fn kappa_token_level_counts_partial_phrase_omission() {
        let d = doc("d", "new england patriots win");
        let a = vec![span("d", 0, 20, EntityType::Team)];
        let b = vec![span("d", 12, 20, EntityType::Team)];
        // tokens: team/team, team/none, team/none... table [[1,2],[0,1]] on team-vs-rest
        let report = cohen_kappa(&a, &b, [&d]).unwrap();
        let expected = Contingency::from_rows(vec![vec![1, 2], vec![0, 1]]).unwrap().kappa().unwrap();
        assert_eq!(report.per_type[&EntityType::Team], expected);
        assert!(report.overall < 1.0 && report.overall >= -1.0);
    }

    #[test]
    fn kappa_of_independent_annotators_is_near_zero() {
        let n = 10_000;
        let body = vec!["w"; n].join(" ");
        let d = doc("d", &body);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut draw = || {
            (0..n)
                .filter_map(|i| {
                    let r: f64 = rng.random();
                    (r < 0.3).then(|| span("d", 2 * i, 2 * i + 1, EntityType::ALL[rng.random_range(0..3)]))
                })
                .collect::<Vec<_>>()
        };
        let (a, b) = (draw(), draw());
        let report = cohen_kappa(&a, &b, [&d]).unwrap();
        assert_eq!(report.tokens, n as u64);
        assert!(report.overall.abs() <= 0.05, "kappa {}", report.overall);
    }

    #[test]
    fn perfect_and_shifted_predictions() {
        let gold = vec![
            span("a", 0, 5, EntityType::Player),
            span("a", 10, 15, EntityType::Team),
            span("b", 3, 9, EntityType::Injury),
        ];
        let e = evaluate(&gold, &gold, MatchMode::Exact);
        assert_eq!((e.overall.precision, e.overall.recall, e.overall.f1), (1.0, 1.0, 1.0));

        let shifted: Vec<EntitySpan> = gold
            .iter()
            .map(|s| EntitySpan {
                start: s.start + 1,
                end: s.end + 1,
                ..s.clone()
            })
            .collect();
        assert_eq!(evaluate(&shifted, &gold, MatchMode::Exact).overall.f1, 0.0);
        assert_eq!(evaluate(&shifted, &gold, MatchMode::Overlap).overall.f1, 1.0);

        let none = evaluate(&[], &gold, MatchMode::Exact);
        assert_eq!((none.overall.precision, none.overall.recall, none.overall.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn overlap_matches_each_gold_once() {
        let gold = vec![span("a", 0, 10, EntityType::Team)];
        let pred = vec![span("a", 0, 4, EntityType::Team), span("a", 5, 10, EntityType::Team)];
        let e = evaluate(&pred, &gold, MatchMode::Overlap);
        assert_eq!(e.overall.true_positives, 1);
        assert_eq!(e.overall.precision, 0.5);
        assert_eq!(e.overall.recall, 1.0);
        // type must agree
        let wrong_type = vec![span("a", 0, 10, EntityType::Player)];
        assert_eq!(evaluate(&wrong_type, &gold, MatchMode::Overlap).overall.true_positives, 0);
    }

    #[test]
    fn swapping_sets_swaps_precision_and_recall() {
        let a = vec![span("a", 0, 3, EntityType::Coach), span("a", 4, 8, EntityType::Fans), span("b", 0, 2, EntityType::Gear)];
        let b = vec![span("a", 0, 3, EntityType::Coach), span("b", 0, 2, EntityType::Gear)];
        let ab = evaluate(&a, &b, MatchMode::Exact);
        let ba = evaluate(&b, &a, MatchMode::Exact);
        assert_eq!(ab.overall.precision, ba.overall.recall);
        assert_eq!(ab.overall.recall, ba.overall.precision);
        assert_eq!(ab.overall.f1, ba.overall.f1);
    }
}
