//! Training glue shared by the CLI stages: embedding tables from the corpus
//! and encyclopedia text, the four state classifiers, projection training
//! rows, and an in-memory path from raw inputs to an [`InsightEngine`].

use std::collections::BTreeMap;

use crate::annotation::Dictionary;
use crate::classifier::{evaluate_classifier, train, ClassifierMetrics, PlayerState, TrainedNetwork, TrainingRun};
use crate::config::PipelineConfig;
use crate::corpus::CorpusStore;
use crate::distribution::registry;
use crate::embedding::{train_skipgram, training_tokens, EmbeddingTable, TableRole};
use crate::error::{Error, Result};
use crate::insights::{state_label, FeatureContext, FeatureRow, InsightEngine, ScoreBook};
use crate::labeling::{LabelSet, WeeklyStat};
use crate::projection::{fit_ensemble, Ensemble, ProjectionInput, TrainingRow};
use crate::roster::PlayerBio;

/// Sentence-level token lists: text is split on periods and newlines.
pub fn sentences(text: &str) -> Vec<Vec<String>> {
    text.split(['.', '\n', '!', '?'])
        .map(training_tokens)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn corpus_sentences(corpus: &CorpusStore) -> Vec<Vec<String>> {
    corpus.documents().flat_map(|d| sentences(&d.body)).collect()
}

/// The broad table trains on the corpus, the encyclopedia table on the
/// reference text; both share the configured dimension.
pub fn train_tables(corpus: &CorpusStore, encyclopedia_text: &str, config: &PipelineConfig) -> Result<(EmbeddingTable, EmbeddingTable)> {
    let sg = config.skipgram();
    let encyclopedia = train_skipgram(&sentences(encyclopedia_text), &sg, TableRole::Encyclopedia)?;
    let broad = train_skipgram(&corpus_sentences(corpus), &sg, TableRole::Broad)?;
    Ok((encyclopedia, broad))
}

/// Last week used for fitting; the final `holdout_weeks` weeks are held out.
pub fn training_cutoff(weeks: impl IntoIterator<Item = u32>, holdout_weeks: u32) -> u32 {
    let last = weeks.into_iter().max().unwrap_or(0);
    last.saturating_sub(holdout_weeks).max(1)
}

/// Feature rows paired with their labels for one state. Rows without a
/// label are skipped.
pub fn classifier_dataset(rows: &[FeatureRow], labels: &[LabelSet], state: PlayerState) -> (Vec<Vec<f64>>, Vec<f64>) {
    let by_key: BTreeMap<(&str, u32), &LabelSet> = labels.iter().map(|l| ((l.player_id.as_str(), l.week), l)).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for r in rows {
        if let Some(l) = by_key.get(&(r.player_id.as_str(), r.week)) {
            x.push(r.features.clone());
            y.push(state_label(l, state));
        }
    }
    (x, y)
}

pub fn train_state_classifier(
    config: &PipelineConfig,
    rows: &[FeatureRow],
    labels: &[LabelSet],
    state: PlayerState,
) -> Result<TrainingRun> {
    let (x, y) = classifier_dataset(rows, labels, state);
    let dim = x.first().map(Vec::len).ok_or_else(|| Error::EmptySample("no labeled feature rows".into()))?;
    let net = config.network(dim, state.activation());
    let mut opts = config.train_options();
    // Distinct streams per state so the four networks do not share draws.
    opts.seed = config.seed.wrapping_add(state as u64 + 1);
    train(&net, &x, &y, &opts)
}

/// Projection training rows: classifier probabilities on each feature row
/// next to the baseline projection and the realized score.
pub fn projection_rows(
    rows: &[FeatureRow],
    classifiers: &BTreeMap<PlayerState, TrainedNetwork>,
    stats: &[WeeklyStat],
) -> Result<Vec<TrainingRow>> {
    let by_key: BTreeMap<(&str, u32), &WeeklyStat> = stats.iter().map(|s| ((s.player_id.as_str(), s.week), s)).collect();
    let mut probs: BTreeMap<PlayerState, Vec<f64>> = BTreeMap::new();
    let x: Vec<Vec<f64>> = rows.iter().map(|r| r.features.clone()).collect();
    for s in PlayerState::ALL {
        let net = classifiers.get(&s).ok_or_else(|| Error::MissingModel(format!("{s} classifier")))?;
        probs.insert(s, net.predict_batch(&x)?);
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let Some(stat) = by_key.get(&(r.player_id.as_str(), r.week)) else { continue };
        out.push(TrainingRow {
            input: ProjectionInput {
                player_id: r.player_id.clone(),
                week: r.week,
                position: stat.position,
                baseline_projection: stat.projected,
                p_boom: probs[&PlayerState::Boom][i],
                p_bust: probs[&PlayerState::Bust][i],
                p_injury: probs[&PlayerState::Injury][i],
                p_meaningful: probs[&PlayerState::Meaningful][i],
            },
            actual: stat.actual,
        });
    }
    Ok(out)
}

/// Raw inputs for an end-to-end in-memory run.
#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub config: PipelineConfig,
    pub corpus: CorpusStore,
    pub dictionaries: Vec<Dictionary>,
    pub encyclopedia_text: String,
    pub roster: Vec<PlayerBio>,
    pub history: Vec<WeeklyStat>,
    pub stats: Vec<WeeklyStat>,
    pub labels: Vec<LabelSet>,
}

impl PipelineInputs {
    pub fn from_world(world: &crate::synth::World) -> PipelineInputs {
        let mut corpus = CorpusStore::new();
        corpus.ingest(world.documents.iter().cloned());
        PipelineInputs {
            config: world.config.pipeline_config(),
            corpus,
            dictionaries: world.dictionaries.clone(),
            encyclopedia_text: world.encyclopedia.clone(),
            roster: world.roster.clone(),
            history: world.history.clone(),
            stats: world.stats.clone(),
            labels: world.labeling.labels.clone(),
        }
    }
}

/// Every intermediate product of [`fit_engine`].
#[derive(Debug, Clone)]
pub struct FittedPipeline {
    pub engine: InsightEngine,
    pub feature_rows: Vec<FeatureRow>,
    pub cutoff: u32,
    pub runs: BTreeMap<PlayerState, TrainingRun>,
}

/// Trains embeddings, classifiers and the projection ensemble on weeks up
/// to the holdout cutoff.
pub fn fit_engine(inputs: PipelineInputs) -> Result<FittedPipeline> {
    let cfg = inputs.config.clone();
    let (encyclopedia, broad) = train_tables(&inputs.corpus, &inputs.encyclopedia_text, &cfg).map_err(|e| e.in_stage("embed"))?;
    let context = FeatureContext::new(cfg.clone(), inputs.corpus, &inputs.dictionaries, encyclopedia, broad, &inputs.roster)?;
    let keys: Vec<(String, u32)> = inputs.stats.iter().map(|s| (s.player_id.clone(), s.week)).collect();
    let feature_rows = context.feature_rows(&keys)?;
    let cutoff = training_cutoff(feature_rows.iter().map(|r| r.week), cfg.holdout_weeks);
    let train_rows: Vec<FeatureRow> = feature_rows.iter().filter(|r| r.week <= cutoff).cloned().collect();

    let mut runs = BTreeMap::new();
    let mut classifiers = BTreeMap::new();
    for s in PlayerState::ALL {
        let run = train_state_classifier(&cfg, &train_rows, &inputs.labels, s).map_err(|e| e.in_stage("classify"))?;
        classifiers.insert(s, run.network.clone());
        runs.insert(s, run);
    }
    let rows = projection_rows(&train_rows, &classifiers, &inputs.stats)?;
    let ensemble: Ensemble = fit_ensemble(&rows, cfg.feature_set).map_err(|e| e.in_stage("projection"))?;
    Ok(FittedPipeline {
        engine: InsightEngine {
            context,
            classifiers,
            ensemble,
            scores: ScoreBook::new(&inputs.history, &inputs.stats),
            families: registry(),
        },
        feature_rows,
        cutoff,
        runs,
    })
}

impl FittedPipeline {
    /// Per-state metrics on the weeks after the cutoff.
    pub fn holdout_metrics(&self, labels: &[LabelSet]) -> Result<BTreeMap<PlayerState, ClassifierMetrics>> {
        let test: Vec<FeatureRow> = self.feature_rows.iter().filter(|r| r.week > self.cutoff).cloned().collect();
        let mut out = BTreeMap::new();
        for s in PlayerState::ALL {
            let (x, y) = classifier_dataset(&test, labels, s);
            let net = self.engine.classifiers.get(&s).ok_or_else(|| Error::MissingModel(format!("{s} classifier")))?;
            out.insert(s, evaluate_classifier(net, &x, &y)?);
        }
        Ok(out)
    }
}
