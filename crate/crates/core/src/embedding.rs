//! Word embeddings, document feature summaries and player vectors.
//!
//! Two tables are trained with skip-gram and negative sampling: a broad table
//! over the document corpus and an encyclopedia table over curated football
//! phrases. A document is summarized into keyword, concept and entity term
//! sets; a summary embeds as the mean of its term vectors in each table,
//! concatenated encyclopedia-first. A player's vector is the mean of their
//! documents' summary embeddings.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::EntitySpan;
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::text;

/// Default number of tf-idf keywords kept per document.
pub const DEFAULT_KEYWORDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableRole {
    Broad,
    Encyclopedia,
}

impl TableRole {
    pub fn as_str(self) -> &'static str {
        match self {
            TableRole::Broad => "broad",
            TableRole::Encyclopedia => "encyclopedia",
        }
    }
}

impl fmt::Display for TableRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "broad" => Ok(TableRole::Broad),
            "encyclopedia" => Ok(TableRole::Encyclopedia),
            other => Err(Error::invalid(format!("unknown table role {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub role: TableRole,
    dimension: usize,
    terms: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major, one row of `dimension` values per term.
    vectors: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(role: TableRole, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        Ok(EmbeddingTable {
            role,
            dimension,
            terms: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        })
    }

    /// Adds or replaces a term's vector.
    pub fn insert(&mut self, term: &str, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::ShapeMismatch {
                expected: self.dimension,
                got: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vector for {term:?} is not finite")));
        }
        if term.is_empty() || term.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("term {term:?} must be a single non-empty token")));
        }
        match self.index.get(term) {
            Some(&i) => self.vectors[i * self.dimension..(i + 1) * self.dimension].copy_from_slice(vector),
            None => {
                self.index.insert(term.to_string(), self.terms.len());
                self.terms.push(term.to_string());
                self.vectors.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.vectors[i * self.dimension..(i + 1) * self.dimension])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), &self.vectors[i * self.dimension..(i + 1) * self.dimension]))
    }

    /// Mean of the in-vocabulary token vectors of a (possibly multi-token)
    /// term, or `None` when no token is in the vocabulary.
    pub fn term_vector(&self, term: &str) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dimension];
        let mut n = 0usize;
        for w in text::words(term) {
            if let Some(v) = self.get(&w) {
                add_into(&mut sum, v);
                n += 1;
            }
        }
        (n > 0).then(|| scale(sum, n))
    }

    /// Returns the table with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> EmbeddingTable {
        let mut out = self.clone();
        out.vectors.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\t{}\n", self.dimension, self.role);
        for (term, v) in self.terms() {
            let values: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{term}\t{}\n", values.join(" ")));
        }
        out
    }

    pub fn parse(input: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse("line 1", "missing table header"))?;
        let (dim, role) = header
            .split_once('\t')
            .ok_or_else(|| Error::parse("line 1", "header must be `dimension<TAB>role`"))?;
        let dimension: usize = dim
            .trim()
            .parse()
            .map_err(|_| Error::parse("line 1", format!("bad dimension {dim:?}")))?;
        let mut table = EmbeddingTable::new(role.parse()?, dimension)?;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let location = format!("line {}", i + 1);
            let (term, values) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&location, "expected `term<TAB>values`"))?;
            let vector = values
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| Error::parse(&location, format!("bad value {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            table.insert(term, &vector).map_err(|e| Error::parse(&location, e.to_string()))?;
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let input = fs::read_to_string(path)?;
        EmbeddingTable::parse(&input).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn add_into(acc: &mut [f64], v: &[f64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
}

fn scale(mut v: Vec<f64>, n: usize) -> Vec<f64> {
    let n = n as f64;
    v.iter_mut().for_each(|x| *x /= n);
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity; zero when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let d = norm(a) * norm(b);
    if d == 0.0 {
        0.0
    } else {
        (dot(a, b) / d).clamp(-1.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipGramConfig {
    pub dimension: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Tokens seen fewer times are left out of the vocabulary.
    pub min_count: usize,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dimension: 48,
            window: 5,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            seed: 1,
        }
    }
}

/// Splits text into training tokens: lowercase words minus stopwords and
/// purely numeric tokens.
pub fn training_tokens(text: &str) -> Vec<String> {
    text::words(text)
        .into_iter()
        .filter(|w| !text::is_stopword(w) && w.chars().any(char::is_alphabetic))
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Skip-gram with negative sampling, single-threaded and deterministic for a
/// given seed. Sentences are visited in a seeded shuffled order each epoch and
/// the learning rate decays linearly to 1e-4 of its initial value.
pub fn train_skipgram(corpus: &[Vec<String>], config: &SkipGramConfig, role: TableRole) -> Result<EmbeddingTable> {
    if config.dimension < 2 {
        return Err(Error::invalid("embedding dimension must be at least 2"));
    }
    if config.window == 0 {
        return Err(Error::invalid("window must be positive"));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for sentence in corpus {
        for w in sentence {
            *counts.entry(w.as_str()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(&str, usize)> = counts.into_iter().filter(|(_, c)| *c >= config.min_count.max(1)).collect();
    if vocab.is_empty() {
        return Err(Error::EmptySample("training corpus has no tokens".into()));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let ids: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, (w, _))| (*w, i)).collect();
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| s.iter().filter_map(|w| ids.get(w.as_str()).copied()).collect::<Vec<_>>())
        .filter(|s| s.len() > 1)
        .collect();

    let d = config.dimension;
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = 0.5 / d as f64;
    let mut input: Vec<f64> = (0..v * d).map(|_| rng.random_range(-bound..bound)).collect();
    let mut output = vec![0.0; v * d];
    let noise = WeightedIndex::new(vocab.iter().map(|(_, c)| (*c as f64).powf(0.75)))
        .map_err(|e| Error::invalid(format!("noise distribution: {e}")))?;

    let total: usize = sentences.iter().map(Vec::len).sum::<usize>() * config.epochs;
    let mut seen = 0usize;
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut grad = vec![0.0; d];
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &sentences[si];
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = config.learning_rate * (1.0 - seen as f64 / (total as f64 + 1.0)).max(1e-4);
                seen += 1;
                let reach = rng.random_range(1..=config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                for (cpos, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let ctx_row = context * d..(context + 1) * d;
                    for k in 0..=config.negative_samples {
                        let (target, label) = if k == 0 {
                            (center, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == center {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let out_row = target * d..(target + 1) * d;
                        let score = dot(&input[ctx_row.clone()], &output[out_row.clone()]);
                        let g = lr * (label - sigmoid(score));
                        for j in 0..d {
                            grad[j] += g * output[out_row.start + j];
                            output[out_row.start + j] += g * input[ctx_row.start + j];
                        }
                    }
                    add_into(&mut input[ctx_row], &grad);
                }
            }
        }
    }

    let mut table = EmbeddingTable::new(role, d)?;
    for (i, (w, _)) in vocab.iter().enumerate() {
        table.insert(w, &input[i * d..(i + 1) * d])?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Document frequencies of candidate keyword tokens over a document set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermStatistics {
    pub documents: usize,
    df: HashMap<String, usize>,
}

impl TermStatistics {
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a Document>,
    {
        let mut stats = TermStatistics::default();
        for doc in docs {
            stats.documents += 1;
            let distinct: BTreeSet<String> = keyword_candidates(&doc.body).into_iter().collect();
            for w in distinct {
                *stats.df.entry(w).or_default() += 1;
            }
        }
        stats
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    /// `ln(N / df)`, with both counts floored at 1 so unseen terms score as
    /// if they appeared once.
    pub fn idf(&self, term: &str) -> f64 {
        (self.documents.max(1) as f64 / self.document_frequency(term).max(1) as f64).ln()
    }
}

fn keyword_candidates(body: &str) -> Vec<String> {
    training_tokens(body)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub doc_id: String,
    pub keywords: BTreeSet<String>,
    pub concepts: BTreeSet<String>,
    pub entities: BTreeSet<String>,
}

impl FeatureSummary {
    /// Union of the three term sets in sorted order.
    pub fn terms(&self) -> BTreeSet<&str> {
        self.keywords
            .iter()
            .chain(&self.concepts)
            .chain(&self.entities)
            .map(String::as_str)
            .collect()
    }
}

/// Top-`k` body tokens by `tf · idf`, ties broken alphabetically.
pub fn top_keywords(body: &str, stats: &TermStatistics, k: usize) -> Vec<(String, f64)> {
    let mut tf: BTreeMap<String, usize> = BTreeMap::new();
    for w in keyword_candidates(body) {
        *tf.entry(w).or_default() += 1;
    }
    let mut scored: Vec<(String, f64)> = tf
        .into_iter()
        .map(|(w, n)| {
            let s = n as f64 * stats.idf(&w);
            (w, s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

pub fn summarize_document(doc: &Document, spans: &[EntitySpan], stats: &TermStatistics, k: usize) -> Result<FeatureSummary> {
    if doc.body.trim().is_empty() {
        return Err(Error::invalid(format!("document {} has an empty body", doc.id)));
    }
    let mut entities = BTreeSet::new();
    let mut concepts = BTreeSet::new();
    for span in spans.iter().filter(|s| s.doc_id == doc.id) {
        let term = text::normalize_phrase(&span.surface);
        if term.is_empty() {
            continue;
        }
        if span.entity_type.is_concept() {
            concepts.insert(term.clone());
        }
        entities.insert(term);
    }
    Ok(FeatureSummary {
        doc_id: doc.id.clone(),
        keywords: top_keywords(&doc.body, stats, k).into_iter().map(|(w, _)| w).collect(),
        concepts,
        entities,
    })
}

fn mean_over_terms<'a>(terms: impl Iterator<Item = &'a str>, table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; table.dimension()];
    let mut n = 0usize;
    for t in terms {
        if let Some(v) = table.term_vector(t) {
            add_into(&mut sum, &v);
            n += 1;
        }
    }
    (n > 0).then(|| scale(sum, n))
}

/// Encyclopedia half followed by broad half. A table in which no term is
/// embeddable contributes zeros.
pub fn embed_summary(summary: &FeatureSummary, encyclopedia: &EmbeddingTable, broad: &EmbeddingTable) -> Result<Vec<f64>> {
    if encyclopedia.dimension() != broad.dimension() {
        return Err(Error::ShapeMismatch {
            expected: encyclopedia.dimension(),
            got: broad.dimension(),
        });
    }
    let terms = summary.terms();
    let e = mean_over_terms(terms.iter().copied(), encyclopedia);
    let b = mean_over_terms(terms.iter().copied(), broad);
    if e.is_none() && b.is_none() {
        return Err(Error::UnembeddableSummary);
    }
    let d = broad.dimension();
    let mut out = e.unwrap_or_else(|| vec![0.0; d]);
    out.extend(b.unwrap_or_else(|| vec![0.0; d]));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerVector {
    pub player_id: String,
    pub vector: Vec<f64>,
    pub doc_count: usize,
}

/// Mean summary embedding over the embeddable summaries, accumulated in
/// document-id order so the result does not depend on input order.
pub fn player_vector(
    player_id: &str,
    summaries: &[FeatureSummary],
    encyclopedia: &EmbeddingTable,
    broad: &EmbeddingTable,
) -> Result<PlayerVector> {
    let mut ordered: Vec<&FeatureSummary> = summaries.iter().collect();
    ordered.sort_by(|a, b| a.doc_id.cmp(&b.doc_id).then_with(|| a.terms().cmp(&b.terms())));
    let mut sum = vec![0.0; 2 * broad.dimension()];
    let mut n = 0usize;
    for s in ordered {
        match embed_summary(s, encyclopedia, broad) {
            Ok(v) => {
                add_into(&mut sum, &v);
                n += 1;
            }
            Err(Error::UnembeddableSummary) => {}
            Err(e) => return Err(e),
        }
    }
    if n == 0 {
        return Err(Error::EmptySample(format!("no embeddable summary for player {player_id}")));
    }
    Ok(PlayerVector {
        player_id: player_id.to_string(),
        vector: scale(sum, n),
        doc_count: n,
    })
}

// ---------------------------------------------------------------------------
// Similarity queries
// ---------------------------------------------------------------------------

fn require_terms(table: &EmbeddingTable, terms: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut missing = Vec::new();
    let mut out = Vec::new();
    for t in terms {
        let words = text::words(t);
        if words.is_empty() || words.iter().any(|w| !table.contains(w)) {
            missing.push(t.to_string());
        } else if let Some(v) = table.term_vector(t) {
            out.push(v);
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(Error::OutOfVocabulary(missing))
    }
}

/// Vocabulary terms ranked by cosine similarity to `query`, skipping the
/// excluded tokens. Equal scores rank alphabetically.
pub fn nearest_to_vector(table: &EmbeddingTable, query: &[f64], exclude: &BTreeSet<String>, top_n: usize) -> Vec<(String, f64)> {
    if top_n == 0 {
        return Vec::new();
    }
    let mut scored: Vec<(String, f64)> = table
        .terms()
        .filter(|(t, _)| !exclude.contains(*t))
        .map(|(t, v)| (t.to_string(), cosine(query, v)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(top_n);
    scored
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    if n == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / n).collect()
    }
}

/// The analogy query vector `b − a + c`, built from unit-length term vectors.
pub fn analogy_query(a: &str, b: &str, c: &str, table: &EmbeddingTable) -> Result<Vec<f64>> {
    let v = require_terms(table, &[a, b, c])?;
    let (va, vb, vc) = (unit(&v[0]), unit(&v[1]), unit(&v[2]));
    Ok((0..table.dimension()).map(|i| vb[i] - va[i] + vc[i]).collect())
}

/// "a is to b as c is to ?": candidates ranked by cosine to `b − a + c`,
/// excluding the tokens of the three inputs.
pub fn analogy(a: &str, b: &str, c: &str, table: &EmbeddingTable, top_n: usize) -> Result<Vec<(String, f64)>> {
    let query = analogy_query(a, b, c, table)?;
    let exclude: BTreeSet<String> = [a, b, c].iter().flat_map(|t| text::words(t)).collect();
    Ok(nearest_to_vector(table, &query, &exclude, top_n))
}

/// Cosine-nearest vocabulary terms to `term`, excluding the term's own tokens.
pub fn keyword_neighbors(term: &str, table: &EmbeddingTable, top_n: usize) -> Result<Vec<(String, f64)>> {
    let v = require_terms(table, &[term])?;
    let exclude: BTreeSet<String> = text::words(term).into_iter().collect();
    Ok(nearest_to_vector(table, &v[0], &exclude, top_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::EntityType;
    use chrono::{TimeZone, Utc};

    fn table(role: TableRole, rows: &[(&str, [f64; 2])]) -> EmbeddingTable {
        let mut t = EmbeddingTable::new(role, 2).unwrap();
        for (term, v) in rows {
            t.insert(term, v).unwrap();
        }
        t
    }

    fn summary(terms: &[&str]) -> FeatureSummary {
        FeatureSummary {
            doc_id: "d".into(),
            keywords: terms.iter().map(|t| t.to_string()).collect(),
            concepts: BTreeSet::new(),
            entities: BTreeSet::new(),
        }
    }

    fn doc(id: &str, body: &str) -> Document {
        Document {
            id: id.into(),
            source_kind: crate::corpus::SourceKind::Article,
            source_name: "wire".into(),
            published_at: Utc.with_ymd_and_hms(2018, 9, 5, 12, 0, 0).unwrap(),
            title: "t".into(),
            body: body.into(),
        }
    }


    #[test]
    fn single_term_embeds_to_both_halves() {
        let e = table(TableRole::Encyclopedia, &[("brady", [1.0, 2.0])]);
        let b = table(TableRole::Broad, &[("brady", [3.0, 4.0])]);
        assert_eq!(embed_summary(&summary(&["brady"]), &e, &b).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn mean_skips_unembeddable_terms() {
        let e = table(TableRole::Encyclopedia, &[("a", [1.0, 0.0]), ("b", [0.0, 1.0])]);
        let b = table(TableRole::Broad, &[("a", [2.0, 2.0])]);
        let v = embed_summary(&summary(&["a", "b", "zzz"]), &e, &b).unwrap();
        assert_eq!(v, vec![0.5, 0.5, 2.0, 2.0]);
        // multi-token term: mean of its in-vocabulary tokens
        let v = embed_summary(&summary(&["a b"]), &e, &b).unwrap();
        assert_eq!(v, vec![0.5, 0.5, 2.0, 2.0]);
        assert!(matches!(embed_summary(&summary(&["zzz"]), &e, &b), Err(Error::UnembeddableSummary)));
        let wide = EmbeddingTable::new(TableRole::Broad, 3).unwrap();
        assert!(embed_summary(&summary(&["a"]), &e, &wide).is_err());
    }

    #[test]
    fn player_vector_is_mean_of_summaries() {
        let e = table(TableRole::Encyclopedia, &[("a", [1.0, 0.0]), ("b", [0.0, 1.0])]);
        let b = table(TableRole::Broad, &[("a", [1.0, 1.0]), ("b", [3.0, 3.0])]);
        let mut s1 = summary(&["a"]);
        s1.doc_id = "d1".into();
        let mut s2 = summary(&["b"]);
        s2.doc_id = "d2".into();
        let mut s3 = summary(&["nothing"]);
        s3.doc_id = "d3".into();
        let pv = player_vector("p", &[s2.clone(), s3.clone(), s1.clone()], &e, &b).unwrap();
        assert_eq!(pv.vector, vec![0.5, 0.5, 2.0, 2.0]);
        assert_eq!(pv.doc_count, 2);
        let single = player_vector("p", std::slice::from_ref(&s1), &e, &b).unwrap();
        assert_eq!(single.vector, embed_summary(&s1, &e, &b).unwrap());
        assert!(player_vector("p", &[s3], &e, &b).is_err());
    }

    #[test]
    fn summary_sets() {
        let d = doc("d1", "Tom Brady has a sore ankle after the game");
        let spans = vec![
            EntitySpan {
                doc_id: "d1".into(),
                start: 0,
                end: 9,
                entity_type: EntityType::Player,
                surface: "Tom Brady".into(),
            },
            EntitySpan {
                doc_id: "d1".into(),
                start: 21,
                end: 26,
                entity_type: EntityType::BodyPart,
                surface: "ankle".into(),
            },
            EntitySpan {
                doc_id: "d1".into(),
                start: 16,
                end: 20,
                entity_type: EntityType::Injury,
                surface: "sore".into(),
            },
        ];
        let stats = TermStatistics::from_documents([&d]);
        let s = summarize_document(&d, &spans, &stats, 0).unwrap();
        assert!(s.keywords.is_empty());
        assert_eq!(s.entities.iter().map(String::as_str).collect::<Vec<_>>(), ["ankle", "sore", "tom brady"]);
        assert_eq!(s.concepts.iter().map(String::as_str).collect::<Vec<_>>(), ["sore"]);
        assert!(summarize_document(&doc("e", "  "), &[], &stats, 5).is_err());
    }

    #[test]
    fn cosine_properties() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn analogy_and_neighbors_on_fixed_table() {
        let t = table(
            TableRole::Broad,
            &[("king", [1.0, 1.0]), ("queen", [1.0, -1.0]), ("man", [0.9, 1.1]), ("woman", [0.9, -1.1]), ("apple", [-1.0, 0.1])],
        );
        let r = analogy("man", "woman", "king", &t, 1).unwrap();
        assert_eq!(r[0].0, "queen");
        assert!(matches!(analogy("man", "x", "y", &t, 3), Err(Error::OutOfVocabulary(v)) if v == ["x", "y"]));
        assert!(keyword_neighbors("king", &t, 0).unwrap().is_empty());
        assert_eq!(keyword_neighbors("king", &t, 1).unwrap()[0].0, "man");
    }

    #[test]
    fn table_text_round_trip() {
        let t = table(TableRole::Encyclopedia, &[("a", [0.1, -2.5e-7]), ("b", [1.0 / 3.0, 7.0])]);
        let back = EmbeddingTable::parse(&t.to_text()).unwrap();
        assert_eq!(back, t);
        assert!(EmbeddingTable::parse("2\tbroad\na\t1 2 3\n").is_err());
        assert!(EmbeddingTable::parse("2\tnarrow\n").is_err());
    }

    #[test]
    fn training_rejects_bad_input() {
        let cfg = SkipGramConfig {
            dimension: 0,
            ..SkipGramConfig::default()
        };
        assert!(train_skipgram(&[vec!["a".into(), "b".into()]], &cfg, TableRole::Broad).is_err());
        assert!(train_skipgram(&[], &SkipGramConfig::default(), TableRole::Broad).is_err());
    }
}
