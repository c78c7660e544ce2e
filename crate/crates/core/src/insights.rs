//! Per player-week orchestration: retrieval, annotation, summarization,
//! features, the four state classifiers, the projection ensemble, the score
//! distribution and supporting evidence, assembled into a [`PlayerInsight`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::annotation::{Dictionary, DictionaryAnnotator, EntitySpan, EntityType};
use crate::classifier::{PlayerState, TrainedNetwork};
use crate::config::PipelineConfig;
use crate::corpus::{build_query_plan, execute_with_broadening, week_window, CorpusStore, Document, SourceKind};
use crate::distribution::{
    fit_best, percentiles, score_sample, simulate, Family, FitResult, ScoreHistory, ScoreSample, BAND, MIN_SAMPLE,
};
use crate::embedding::{cosine, embed_summary, player_vector, summarize_document, EmbeddingTable, TermStatistics};
use crate::error::{Error, Result};
use crate::labeling::{LabelSet, WeeklyStat};
use crate::projection::{Ensemble, ProjectionInput};
use crate::roster::{PlayerBio, Position};
use crate::table;

pub const MAX_EVIDENCE: usize = 10;
/// Length of [`SentimentVector::to_features`].
pub const SENTIMENT_DIM: usize = EntityType::ALL.len() + 2;
/// Length of [`bio_vector`].
pub const BIO_DIM: usize = Position::ALL.len() + 4;

// ---------------------------------------------------------------------------
// Sentiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentVector {
    /// Mean span count per document, indexed by [`EntityType::index`].
    pub rates: [f64; 13],
    pub positive_tone_share: f64,
    pub negative_tone_share: f64,
    /// No tone span in any document; both shares are then 0.
    pub no_tone: bool,
}

impl SentimentVector {
    pub fn rate(&self, t: EntityType) -> f64 {
        self.rates[t.index()]
    }

    pub fn to_features(&self) -> Vec<f64> {
        let mut v = self.rates.to_vec();
        v.push(self.positive_tone_share);
        v.push(self.negative_tone_share);
        v
    }
}

/// Per-type mean span count over `docs`, counting only spans that belong to
/// one of them.
pub fn sentiment_vector(docs: &[Document], spans: &[EntitySpan]) -> Result<SentimentVector> {
    if docs.is_empty() {
        return Err(Error::EmptySample("no documents for sentiment".into()));
    }
    let ids: BTreeSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let mut counts = [0usize; 13];
    for s in spans.iter().filter(|s| ids.contains(s.doc_id.as_str())) {
        counts[s.entity_type.index()] += 1;
    }
    let n = docs.len() as f64;
    let mut rates = [0.0; 13];
    for (r, c) in rates.iter_mut().zip(counts) {
        *r = c as f64 / n;
    }
    let pos = counts[EntityType::PositiveTone.index()] as f64;
    let neg = counts[EntityType::NegativeTone.index()] as f64;
    let tone = pos + neg;
    Ok(SentimentVector {
        rates,
        positive_tone_share: if tone > 0.0 { pos / tone } else { 0.0 },
        negative_tone_share: if tone > 0.0 { neg / tone } else { 0.0 },
        no_tone: tone == 0.0,
    })
}

// ---------------------------------------------------------------------------
// Bio
// ---------------------------------------------------------------------------

/// Population mean and deviation of (age, seasons_pro, height, weight).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BioStandardization {
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

fn bio_numbers(b: &PlayerBio) -> [f64; 4] {
    [b.age, b.seasons_pro, b.height_cm, b.weight_kg]
}

impl BioStandardization {
    /// Constant columns get unit deviation so they standardize to 0.
    pub fn fit(roster: &[PlayerBio]) -> Result<BioStandardization> {
        if roster.is_empty() {
            return Err(Error::EmptySample("empty roster".into()));
        }
        let n = roster.len() as f64;
        let mut mean = [0.0; 4];
        let mut std = [0.0; 4];
        for j in 0..4 {
            mean[j] = roster.iter().map(|b| bio_numbers(b)[j]).sum::<f64>() / n;
            let var = roster.iter().map(|b| (bio_numbers(b)[j] - mean[j]).powi(2)).sum::<f64>() / n;
            std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
        Ok(BioStandardization { mean, std })
    }
}

/// Position one-hot followed by the standardized numeric fields.
pub fn bio_vector(bio: &PlayerBio, standardization: &BioStandardization) -> Result<Vec<f64>> {
    bio.validate()?;
    let mut v = vec![0.0; Position::ALL.len()];
    v[bio.position.index()] = 1.0;
    for (j, x) in bio_numbers(bio).iter().enumerate() {
        v.push((x - standardization.mean[j]) / standardization.std[j]);
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Evidence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Support,
    Refute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub doc_id: String,
    pub title: String,
    pub source_kind: SourceKind,
    pub relevance: f64,
    pub stance: Stance,
    /// Equal positive and negative tone counts; stance defaults to support.
    pub neutral: bool,
}

/// Most probable state; ties go to the earlier of boom, bust, injury,
/// meaningful.
pub fn dominant_state(p: &StateProbabilities) -> PlayerState {
    let mut best = PlayerState::Boom;
    for s in PlayerState::ALL {
        if p.get(s) > p.get(best) {
            best = s;
        }
    }
    best
}

/// Top documents by |cosine(document, player vector)|. A document supports
/// the assessment when its tone polarity agrees with the dominant state's
/// valence.
pub fn select_evidence(
    docs: &[Document],
    doc_embeddings: &BTreeMap<String, Vec<f64>>,
    player_vector: &[f64],
    spans: &[EntitySpan],
    dominant: PlayerState,
) -> Vec<EvidenceItem> {
    let mut polarity: BTreeMap<&str, i64> = BTreeMap::new();
    for s in spans {
        let d = match s.entity_type {
            EntityType::PositiveTone => 1,
            EntityType::NegativeTone => -1,
            _ => continue,
        };
        *polarity.entry(s.doc_id.as_str()).or_default() += d;
    }
    let mut items: Vec<EvidenceItem> = docs
        .iter()
        .filter_map(|d| {
            let emb = doc_embeddings.get(&d.id)?;
            let p = polarity.get(d.id.as_str()).copied().unwrap_or(0).signum();
            let agrees = p == 0 || (p > 0) == dominant.is_positive();
            Some(EvidenceItem {
                doc_id: d.id.clone(),
                title: d.title.clone(),
                source_kind: d.source_kind,
                relevance: cosine(emb, player_vector).clamp(-1.0, 1.0),
                stance: if agrees { Stance::Support } else { Stance::Refute },
                neutral: p == 0,
            })
        })
        .collect();
    items.sort_by(|a, b| {
        b.relevance
            .abs()
            .total_cmp(&a.relevance.abs())
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    items.truncate(MAX_EVIDENCE);
    items
}

// ---------------------------------------------------------------------------
// Insight records
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateProbabilities {
    pub boom: f64,
    pub bust: f64,
    pub injury: f64,
    pub meaningful: f64,
}

impl StateProbabilities {
    pub fn get(&self, s: PlayerState) -> f64 {
        match s {
            PlayerState::Boom => self.boom,
            PlayerState::Bust => self.bust,
            PlayerState::Injury => self.injury,
            PlayerState::Meaningful => self.meaningful,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InsightFlags {
    /// No document (or no embeddable document) for the player-week; the
    /// classifier stage was skipped and the baseline passed through.
    pub embedding_free: bool,
    /// Retrieval never reached `min_results`.
    pub below_min_results: bool,
    pub query_level: usize,
    pub pooled_projection_model: bool,
    pub cross_position_donors: bool,
    /// All documents lacked tone spans.
    pub no_tone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerInsight {
    pub player_id: String,
    pub week: u32,
    pub name: String,
    pub team: String,
    pub position: Position,
    pub baseline_projection: f64,
    pub probabilities: Option<StateProbabilities>,
    pub dominant_state: Option<PlayerState>,
    pub combined_projection: f64,
    pub sample: ScoreSample,
    pub fit: FitResult,
    pub p15: f64,
    pub p85: f64,
    pub evidence: Vec<EvidenceItem>,
    pub doc_count: usize,
    pub flags: InsightFlags,
}

impl PlayerInsight {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::invalid(format!("insight {} week {}: {m}", self.player_id, self.week)));
        if let Some(p) = &self.probabilities {
            for s in PlayerState::ALL {
                if !(p.get(s) > 0.0 && p.get(s) < 1.0) {
                    return fail(format!("{s} probability {} outside (0, 1)", p.get(s)));
                }
            }
        }
        if self.probabilities.is_some() != self.dominant_state.is_some() {
            return fail("dominant state must accompany probabilities".into());
        }
        if !(self.p15 <= self.p85) {
            return fail(format!("p15 {} above p85 {}", self.p15, self.p85));
        }
        if self.evidence.len() > MAX_EVIDENCE {
            return fail(format!("{} evidence items", self.evidence.len()));
        }
        for pair in self.evidence.windows(2) {
            if pair[0].relevance.abs() < pair[1].relevance.abs() {
                return fail("evidence not sorted by |relevance|".into());
            }
        }
        if self.evidence.iter().any(|e| !(-1.0..=1.0).contains(&e.relevance)) {
            return fail("relevance outside [-1, 1]".into());
        }
        if !self.combined_projection.is_finite() || !self.fit.converged {
            return fail("projection or fit unusable".into());
        }
        Ok(())
    }
}

/// One JSON record per line.
pub fn format_insights(insights: &[PlayerInsight]) -> Result<String> {
    let mut out = String::new();
    for i in insights {
        out.push_str(&serde_json::to_string(i)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_insights(input: &str) -> Result<Vec<PlayerInsight>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(format!("line {}", i + 1), e.to_string())))
        .collect()
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

pub fn state_label(l: &LabelSet, s: PlayerState) -> f64 {
    let v = match s {
        PlayerState::Boom => l.boom,
        PlayerState::Bust => l.bust,
        PlayerState::Injury => l.play_with_injury,
        PlayerState::Meaningful => l.meaningful,
    };
    if v {
        1.0
    } else {
        0.0
    }
}

/// Everything retrieved and derived for one player-week before the models
/// run.
#[derive(Debug, Clone)]
pub struct PlayerWeekData {
    pub player_id: String,
    pub week: u32,
    pub documents: Vec<Document>,
    pub spans: Vec<EntitySpan>,
    pub query_level: usize,
    pub threshold_met: bool,
    pub player_vector: Option<Vec<f64>>,
    pub doc_embeddings: BTreeMap<String, Vec<f64>>,
    pub sentiment: Option<SentimentVector>,
    /// Embedding ∥ bio ∥ sentiment; absent when nothing was embeddable.
    pub features: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub player_id: String,
    pub week: u32,
    pub features: Vec<f64>,
}

pub fn format_feature_rows(rows: &[FeatureRow]) -> Result<String> {
    let dim = rows.first().map_or(0, |r| r.features.len());
    let mut out = String::from("player_id,week");
    for j in 0..dim {
        let _ = write!(out, ",f{j}");
    }
    out.push('\n');
    for r in rows {
        if r.features.len() != dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                got: r.features.len(),
            });
        }
        table::check_field(&r.player_id)?;
        let _ = write!(out, "{},{}", r.player_id, r.week);
        for x in &r.features {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_feature_rows(input: &str) -> Result<Vec<FeatureRow>> {
    let rows = table::rows(input, "player_id");
    let mut out = Vec::with_capacity(rows.len());
    let mut dim = None;
    for r in rows {
        let features = (2..r.len()).map(|i| r.parse::<f64>(i)).collect::<Result<Vec<f64>>>()?;
        if *dim.get_or_insert(features.len()) != features.len() {
            return Err(Error::parse(format!("line {}", r.line), "ragged feature row"));
        }
        out.push(FeatureRow {
            player_id: r.str(0)?.to_string(),
            week: r.parse(1)?,
            features,
        });
    }
    Ok(out)
}

/// Read-only stores needed to turn a player-week into features.
#[derive(Debug, Clone)]
pub struct FeatureContext {
    pub config: PipelineConfig,
    pub corpus: CorpusStore,
    pub annotator: DictionaryAnnotator,
    pub term_stats: TermStatistics,
    pub encyclopedia: EmbeddingTable,
    pub broad: EmbeddingTable,
    pub roster: BTreeMap<String, PlayerBio>,
    pub bio: BioStandardization,
}

impl FeatureContext {
    pub fn new(
        config: PipelineConfig,
        corpus: CorpusStore,
        dictionaries: &[Dictionary],
        encyclopedia: EmbeddingTable,
        broad: EmbeddingTable,
        roster: &[PlayerBio],
    ) -> Result<FeatureContext> {
        let term_stats = TermStatistics::from_documents(corpus.documents());
        Ok(FeatureContext {
            annotator: DictionaryAnnotator::new(dictionaries),
            term_stats,
            encyclopedia,
            broad,
            bio: BioStandardization::fit(roster)?,
            roster: roster.iter().map(|b| (b.player_id.clone(), b.clone())).collect(),
            config,
            corpus,
        })
    }

    pub fn feature_dim(&self) -> usize {
        2 * self.broad.dimension() + BIO_DIM + SENTIMENT_DIM
    }

    pub fn bio(&self, player_id: &str) -> Result<&PlayerBio> {
        self.roster.get(player_id).ok_or_else(|| Error::UnknownPlayer(player_id.to_string()))
    }

    /// Retrieval through feature assembly for one player-week.
    pub fn player_week(&self, player_id: &str, week: u32) -> Result<PlayerWeekData> {
        let bio = self.bio(player_id)?;
        let window = week_window(self.config.season_start, week).map_err(|e| e.in_stage("query"))?;
        let plan = build_query_plan(&bio.name, &bio.team, &self.config.league_terms)
            .map_err(|e| e.in_stage("query"))?
            .with_time_range(&window)
            .with_min_results(self.config.min_results);
        let outcome = execute_with_broadening(&plan, &self.corpus).map_err(|e| e.in_stage("query"))?;
        let documents = outcome.documents;

        let spans: Vec<EntitySpan> = documents.iter().flat_map(|d| self.annotator.annotate(d)).collect();

        let mut summaries = Vec::with_capacity(documents.len());
        let mut doc_embeddings = BTreeMap::new();
        for d in &documents {
            let s = summarize_document(d, &spans, &self.term_stats, self.config.keywords).map_err(|e| e.in_stage("summarize"))?;
            match embed_summary(&s, &self.encyclopedia, &self.broad) {
                Ok(v) => {
                    doc_embeddings.insert(d.id.clone(), v);
                }
                Err(Error::UnembeddableSummary) => {}
                Err(e) => return Err(e.in_stage("embed")),
            }
            summaries.push(s);
        }
        let pv = if doc_embeddings.is_empty() {
            None
        } else {
            Some(player_vector(player_id, &summaries, &self.encyclopedia, &self.broad).map_err(|e| e.in_stage("embed"))?)
        };
        let sentiment = if documents.is_empty() {
            None
        } else {
            Some(sentiment_vector(&documents, &spans).map_err(|e| e.in_stage("sentiment"))?)
        };
        let features = match (&pv, &sentiment) {
            (Some(pv), Some(s)) => {
                let mut f = pv.vector.clone();
                f.extend(bio_vector(bio, &self.bio).map_err(|e| e.in_stage("bio"))?);
                f.extend(s.to_features());
                Some(f)
            }
            _ => None,
        };
        Ok(PlayerWeekData {
            player_id: player_id.to_string(),
            week,
            documents,
            spans,
            query_level: outcome.level,
            threshold_met: outcome.threshold_met,
            player_vector: pv.map(|p| p.vector),
            doc_embeddings,
            sentiment,
            features,
        })
    }

    /// Feature rows for every listed player-week that has features.
    pub fn feature_rows(&self, keys: &[(String, u32)]) -> Result<Vec<FeatureRow>> {
        let mut out = Vec::with_capacity(keys.len());
        for (player_id, week) in keys {
            if let Some(features) = self.player_week(player_id, *week)?.features {
                out.push(FeatureRow {
                    player_id: player_id.clone(),
                    week: *week,
                    features,
                });
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Insight assembly
// ---------------------------------------------------------------------------

/// Prior-season and in-season scores, in week order.
#[derive(Debug, Clone, Default)]
pub struct ScoreBook {
    history: BTreeMap<String, Vec<f64>>,
    season: BTreeMap<String, BTreeMap<u32, WeeklyStat>>,
}

impl ScoreBook {
    pub fn new(history: &[WeeklyStat], season: &[WeeklyStat]) -> ScoreBook {
        let mut book = ScoreBook::default();
        let mut hist: Vec<&WeeklyStat> = history.iter().collect();
        hist.sort_by(|a, b| a.player_id.cmp(&b.player_id).then(a.week.cmp(&b.week)));
        for s in hist {
            book.history.entry(s.player_id.clone()).or_default().push(s.actual);
        }
        for s in season {
            book.season.entry(s.player_id.clone()).or_default().insert(s.week, s.clone());
        }
        book
    }

    pub fn stat(&self, player_id: &str, week: u32) -> Option<&WeeklyStat> {
        self.season.get(player_id)?.get(&week)
    }

    /// Scores known before `week` kicks off.
    pub fn scores_before(&self, player_id: &str, week: u32) -> Vec<f64> {
        let mut v = self.history.get(player_id).cloned().unwrap_or_default();
        if let Some(s) = self.season.get(player_id) {
            v.extend(s.range(..week).map(|(_, st)| st.actual));
        }
        v
    }

    pub fn projections_before(&self, player_id: &str, week: u32) -> Vec<f64> {
        self.season
            .get(player_id)
            .map(|s| s.range(..week).map(|(_, st)| st.projected).collect())
            .unwrap_or_default()
    }

    pub fn mean_projection(&self, player_id: &str, through_week: u32) -> Option<f64> {
        let p: Vec<f64> = self.season.get(player_id)?.range(..=through_week).map(|(_, s)| s.projected).collect();
        (!p.is_empty()).then(|| p.iter().sum::<f64>() / p.len() as f64)
    }
}

fn stream_seed(seed: u64, player_id: &str, week: u32) -> u64 {
    // FNV-1a over the player id, mixed with the week and the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in player_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.rotate_left(17) ^ (u64::from(week) << 40)
}

/// All fitted models plus the stores they read.
#[derive(Debug, Clone)]
pub struct InsightEngine {
    pub context: FeatureContext,
    pub classifiers: BTreeMap<PlayerState, TrainedNetwork>,
    pub ensemble: Ensemble,
    pub scores: ScoreBook,
    pub families: Vec<Family>,
}

impl InsightEngine {
    pub fn build_insight(&self, player_id: &str, week: u32) -> Result<PlayerInsight> {
        let bio = self.context.bio(player_id)?.clone();
        let stat = self
            .scores
            .stat(player_id, week)
            .ok_or_else(|| Error::invalid(format!("no baseline projection for {player_id} week {week}")).in_stage("projection"))?;
        let baseline = stat.projected;

        let data = self.context.player_week(player_id, week)?;
        let mut flags = InsightFlags {
            below_min_results: !data.threshold_met,
            query_level: data.query_level,
            no_tone: data.sentiment.as_ref().is_none_or(|s| s.no_tone),
            ..InsightFlags::default()
        };

        let probabilities = match &data.features {
            Some(f) => {
                let mut p = [0.0; 4];
                for (i, s) in PlayerState::ALL.iter().enumerate() {
                    let net = self
                        .classifiers
                        .get(s)
                        .ok_or_else(|| Error::MissingModel(format!("{s} classifier")).in_stage("classify"))?;
                    p[i] = net.predict(f).map_err(|e| e.in_stage("classify"))?;
                }
                Some(StateProbabilities {
                    boom: p[0],
                    bust: p[1],
                    injury: p[2],
                    meaningful: p[3],
                })
            }
            None => {
                flags.embedding_free = true;
                None
            }
        };

        let combined = match &probabilities {
            Some(p) => {
                let input = ProjectionInput {
                    player_id: player_id.to_string(),
                    week,
                    position: bio.position,
                    baseline_projection: baseline,
                    p_boom: p.boom,
                    p_bust: p.bust,
                    p_injury: p.injury,
                    p_meaningful: p.meaningful,
                };
                let pred = self.ensemble.predict(&input).map_err(|e| e.in_stage("projection"))?;
                flags.pooled_projection_model = pred.pooled_fallback;
                pred.value
            }
            None => baseline,
        };

        let (sample, fit, p15, p85) = self.distribution(player_id, week, &bio, combined).map_err(|e| e.in_stage("distribution"))?;
        flags.cross_position_donors = sample.cross_position;

        let dominant = probabilities.as_ref().map(dominant_state);
        let evidence = match (&data.player_vector, dominant) {
            (Some(pv), Some(d)) => select_evidence(&data.documents, &data.doc_embeddings, pv, &data.spans, d),
            _ => Vec::new(),
        };

        let insight = PlayerInsight {
            player_id: player_id.to_string(),
            week,
            name: bio.name,
            team: bio.team,
            position: bio.position,
            baseline_projection: baseline,
            probabilities,
            dominant_state: dominant,
            combined_projection: combined,
            sample,
            fit,
            p15,
            p85,
            evidence,
            doc_count: data.documents.len(),
            flags,
        };
        insight.validate()?;
        Ok(insight)
    }

    fn distribution(&self, player_id: &str, week: u32, bio: &PlayerBio, combined: f64) -> Result<(ScoreSample, FitResult, f64, f64)> {
        let cfg = &self.context.config;
        let history_of = |id: &str, b: &PlayerBio| ScoreHistory {
            player_id: id.to_string(),
            position: b.position,
            mean_projection: self.scores.mean_projection(id, week).unwrap_or(0.0),
            scores: self.scores.scores_before(id, week),
        };
        let player = history_of(player_id, bio);
        let mut projections = self.scores.projections_before(player_id, week);
        projections.push(combined);
        // Donors without enough history of their own would contribute nothing.
        let pool: Vec<ScoreHistory> = self
            .context
            .roster
            .iter()
            .filter(|(id, _)| id.as_str() != player_id)
            .map(|(id, b)| history_of(id, b))
            .filter(|h| h.scores.len() >= cfg.min_history)
            .collect();
        let sample = score_sample(&player, &projections, &pool, cfg.min_history, cfg.donors)?;
        let selection = fit_best(&sample.values, &self.families, MIN_SAMPLE)?;
        let draws = simulate(&selection.best, cfg.simulations, stream_seed(cfg.seed, player_id, week))?;
        let band = percentiles(&draws, &BAND)?;
        Ok((sample, selection.best, band[0], band[1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominant_state_breaks_ties_in_fixed_order() {
        let p = StateProbabilities {
            boom: 0.4,
            bust: 0.4,
            injury: 0.4,
            meaningful: 0.4,
        };
        assert_eq!(dominant_state(&p), PlayerState::Boom);
        let p = StateProbabilities {
            boom: 0.1,
            bust: 0.3,
            injury: 0.3,
            meaningful: 0.2,
        };
        assert_eq!(dominant_state(&p), PlayerState::Bust);
    }
}
