//! File names inside a snapshot directory and loaders for the stores and
//! models written there by the CLI stages.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gridiron_core::annotation::{load_dictionaries, Dictionary};
use gridiron_core::classifier::{PlayerState, TrainedNetwork};
use gridiron_core::config::PipelineConfig;
use gridiron_core::corpus::CorpusStore;
use gridiron_core::distribution::registry;
use gridiron_core::embedding::EmbeddingTable;
use gridiron_core::insights::{FeatureContext, InsightEngine, ScoreBook};
use gridiron_core::labeling::{parse_labels, parse_stats, LabelSet, WeeklyStat};
use gridiron_core::projection::Ensemble;
use gridiron_core::roster::{parse_roster, PlayerBio};
use gridiron_core::synth;

pub const CORPUS: &str = "corpus.jsonl";
pub const SPANS: &str = "spans.tsv";
pub const LABELS: &str = "labels.csv";
pub const ENCYCLOPEDIA_TABLE: &str = "encyclopedia.emb";
pub const BROAD_TABLE: &str = "broad.emb";
pub const FEATURES: &str = "features.csv";
pub const PROJECTION_ROWS: &str = "projection_rows.csv";
pub const ENSEMBLE: &str = "ensemble.txt";
pub const INSIGHTS: &str = "insights.jsonl";
pub const ROSTER: &str = "roster.csv";

pub fn model_file(state: PlayerState) -> String {
    format!("dnn_{state}.json")
}

/// Writes through a sibling temp file so a failed run never leaves a
/// truncated artifact behind.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Raw inputs laid out the way `synth generate` writes them.
#[derive(Debug, Clone)]
pub struct DataDir(pub PathBuf);

impl DataDir {
    pub fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn dictionaries(&self) -> Result<Vec<Dictionary>> {
        let p = self.file(synth::DICTIONARY_FILE);
        load_dictionaries(&p).with_context(|| format!("loading {}", p.display()))
    }

    pub fn roster(&self) -> Result<Vec<PlayerBio>> {
        let p = self.file(synth::ROSTER_FILE);
        parse_roster(&read_text(&p)?).with_context(|| format!("parsing {}", p.display()))
    }

    pub fn stats(&self) -> Result<Vec<WeeklyStat>> {
        let p = self.file(synth::STATS_FILE);
        parse_stats(&read_text(&p)?).with_context(|| format!("parsing {}", p.display()))
    }

    pub fn history(&self) -> Result<Vec<WeeklyStat>> {
        let p = self.file(synth::HISTORY_FILE);
        parse_stats(&read_text(&p)?).with_context(|| format!("parsing {}", p.display()))
    }

    pub fn encyclopedia_text(&self) -> Result<String> {
        read_text(&self.file(synth::ENCYCLOPEDIA_FILE))
    }
}

/// Trained artifacts in a snapshot directory.
#[derive(Debug, Clone)]
pub struct SnapshotDir(pub PathBuf);

impl SnapshotDir {
    pub fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn corpus(&self) -> Result<CorpusStore> {
        let p = self.file(CORPUS);
        let (store, _) = CorpusStore::load(&p).with_context(|| format!("loading {} (run `corpus ingest` first)", p.display()))?;
        Ok(store)
    }

    pub fn tables(&self) -> Result<(EmbeddingTable, EmbeddingTable)> {
        let load = |name: &str| {
            let p = self.file(name);
            EmbeddingTable::load(&p).with_context(|| format!("loading {} (run `embed train` first)", p.display()))
        };
        Ok((load(ENCYCLOPEDIA_TABLE)?, load(BROAD_TABLE)?))
    }

    pub fn labels(&self) -> Result<Vec<LabelSet>> {
        let p = self.file(LABELS);
        parse_labels(&read_text(&p).context("run `labels generate` first")?).with_context(|| format!("parsing {}", p.display()))
    }

    pub fn classifier(&self, state: PlayerState) -> Result<TrainedNetwork> {
        let p = self.file(&model_file(state));
        TrainedNetwork::load(&p).with_context(|| format!("loading {} (run `dnn train --state {state}` first)", p.display()))
    }

    pub fn classifiers(&self) -> Result<BTreeMap<PlayerState, TrainedNetwork>> {
        PlayerState::ALL.iter().map(|s| Ok((*s, self.classifier(*s)?))).collect()
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        let p = self.file(ENSEMBLE);
        Ensemble::load(&p).with_context(|| format!("loading {} (run `project fit` first)", p.display()))
    }
}

pub fn feature_context(config: &PipelineConfig, snapshot: &SnapshotDir, data: &DataDir) -> Result<FeatureContext> {
    let (encyclopedia, broad) = snapshot.tables()?;
    let ctx = FeatureContext::new(
        config.clone(),
        snapshot.corpus()?,
        &data.dictionaries()?,
        encyclopedia,
        broad,
        &data.roster()?,
    )?;
    Ok(ctx)
}

/// Every fitted model plus the stores insight generation reads.
pub fn load_engine(config: &PipelineConfig, snapshot: &SnapshotDir, data: &DataDir) -> Result<InsightEngine> {
    Ok(InsightEngine {
        context: feature_context(config, snapshot, data)?,
        classifiers: snapshot.classifiers()?,
        ensemble: snapshot.ensemble()?,
        scores: ScoreBook::new(&data.history()?, &data.stats()?),
        families: registry(),
    })
}
