//! Flat `key = value` pipeline parameters. Blank lines and `#` comments are
//! ignored; unknown keys are rejected so typos do not pass silently.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::classifier::{NetworkConfig, TrainOptions};
use crate::distribution::{DEFAULT_DONORS, DEFAULT_SIMULATIONS, MIN_SAMPLE};
use crate::embedding::{SkipGramConfig, DEFAULT_KEYWORDS};
use crate::error::{Error, Result};
use crate::labeling::{BustDirection, LabelConfig, DEFAULT_MIN_OWNED};
use crate::projection::FeatureSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub season_start: NaiveDate,
    pub league_terms: Vec<String>,
    pub min_results: usize,
    pub keywords: usize,
    pub embedding_dim: usize,
    pub embedding_window: usize,
    pub embedding_negative: usize,
    pub embedding_epochs: usize,
    pub embedding_learning_rate: f64,
    pub min_owned: f64,
    pub bust_direction: BustDirection,
    pub dnn_branch_count: usize,
    pub dnn_branch_layers: usize,
    pub dnn_branch_width: usize,
    pub dnn_dropout: f64,
    pub dnn_trunk_layers: usize,
    pub dnn_trunk_width: usize,
    pub dnn_epochs: usize,
    pub dnn_learning_rate: f64,
    pub dnn_batch_size: usize,
    /// Trailing season weeks held out from classifier and projection fits.
    pub holdout_weeks: u32,
    pub feature_set: FeatureSet,
    pub simulations: usize,
    pub min_history: usize,
    pub donors: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let sg = SkipGramConfig::default();
        let opts = TrainOptions::default();
        PipelineConfig {
            seed: 1,
            season_start: NaiveDate::from_ymd_opt(2018, 9, 4).expect("valid date"),
            league_terms: vec!["nfl".into()],
            min_results: crate::corpus::DEFAULT_MIN_RESULTS,
            keywords: DEFAULT_KEYWORDS,
            embedding_dim: 32,
            embedding_window: sg.window,
            embedding_negative: sg.negative_samples,
            embedding_epochs: sg.epochs,
            embedding_learning_rate: sg.learning_rate,
            min_owned: DEFAULT_MIN_OWNED,
            bust_direction: BustDirection::AsPrinted,
            dnn_branch_count: 6,
            dnn_branch_layers: 7,
            dnn_branch_width: 32,
            dnn_dropout: 0.2,
            dnn_trunk_layers: 6,
            dnn_trunk_width: 64,
            dnn_epochs: opts.epochs,
            dnn_learning_rate: opts.learning_rate,
            dnn_batch_size: opts.batch_size,
            holdout_weeks: 4,
            feature_set: FeatureSet::Combined,
            simulations: DEFAULT_SIMULATIONS,
            min_history: MIN_SAMPLE,
            donors: DEFAULT_DONORS,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| Error::invalid(format!("config key {key}: {e}")))
}

impl PipelineConfig {
    pub fn parse(input: &str) -> Result<PipelineConfig> {
        let mut c = PipelineConfig::default();
        for (i, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("config line {}", i + 1), "expected key = value"))?;
            let (key, raw) = (key.trim(), raw.trim());
            c.set(key, raw).map_err(|e| Error::parse(format!("config line {}", i + 1), e.to_string()))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PipelineConfig> {
        PipelineConfig::parse(&fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "seed" => self.seed = value(key, raw)?,
            "season_start" => self.season_start = value(key, raw)?,
            "league_terms" => {
                self.league_terms = raw.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
            }
            "min_results" => self.min_results = value(key, raw)?,
            "keywords" => self.keywords = value(key, raw)?,
            "embedding_dim" => self.embedding_dim = value(key, raw)?,
            "embedding_window" => self.embedding_window = value(key, raw)?,
            "embedding_negative" => self.embedding_negative = value(key, raw)?,
            "embedding_epochs" => self.embedding_epochs = value(key, raw)?,
            "embedding_learning_rate" => self.embedding_learning_rate = value(key, raw)?,
            "min_owned" => self.min_owned = value(key, raw)?,
            "bust_direction" => self.bust_direction = value(key, raw)?,
            "dnn_branch_count" => self.dnn_branch_count = value(key, raw)?,
            "dnn_branch_layers" => self.dnn_branch_layers = value(key, raw)?,
            "dnn_branch_width" => self.dnn_branch_width = value(key, raw)?,
            "dnn_dropout" => self.dnn_dropout = value(key, raw)?,
            "dnn_trunk_layers" => self.dnn_trunk_layers = value(key, raw)?,
            "dnn_trunk_width" => self.dnn_trunk_width = value(key, raw)?,
            "dnn_epochs" => self.dnn_epochs = value(key, raw)?,
            "dnn_learning_rate" => self.dnn_learning_rate = value(key, raw)?,
            "dnn_batch_size" => self.dnn_batch_size = value(key, raw)?,
            "holdout_weeks" => self.holdout_weeks = value(key, raw)?,
            "feature_set" => self.feature_set = value(key, raw)?,
            "simulations" => self.simulations = value(key, raw)?,
            "min_history" => self.min_history = value(key, raw)?,
            "donors" => self.donors = value(key, raw)?,
            other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_results == 0 || self.keywords == 0 || self.embedding_dim == 0 {
            return Err(Error::invalid("min_results, keywords and embedding_dim must be positive"));
        }
        if self.dnn_batch_size == 0 || self.simulations == 0 || self.min_history == 0 || self.donors == 0 {
            return Err(Error::invalid("dnn_batch_size, simulations, min_history and donors must be positive"));
        }
        if !(0.0..1.0).contains(&self.dnn_dropout) {
            return Err(Error::invalid("dnn_dropout must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("seed", self.seed.to_string());
        put("season_start", self.season_start.to_string());
        put("league_terms", self.league_terms.join(","));
        put("min_results", self.min_results.to_string());
        put("keywords", self.keywords.to_string());
        put("embedding_dim", self.embedding_dim.to_string());
        put("embedding_window", self.embedding_window.to_string());
        put("embedding_negative", self.embedding_negative.to_string());
        put("embedding_epochs", self.embedding_epochs.to_string());
        put("embedding_learning_rate", self.embedding_learning_rate.to_string());
        put("min_owned", self.min_owned.to_string());
        put(
            "bust_direction",
            match self.bust_direction {
                BustDirection::AsPrinted => "as_printed",
                BustDirection::Inverted => "inverted",
            }
            .into(),
        );
        put("dnn_branch_count", self.dnn_branch_count.to_string());
        put("dnn_branch_layers", self.dnn_branch_layers.to_string());
        put("dnn_branch_width", self.dnn_branch_width.to_string());
        put("dnn_dropout", self.dnn_dropout.to_string());
        put("dnn_trunk_layers", self.dnn_trunk_layers.to_string());
        put("dnn_trunk_width", self.dnn_trunk_width.to_string());
        put("dnn_epochs", self.dnn_epochs.to_string());
        put("dnn_learning_rate", self.dnn_learning_rate.to_string());
        put("dnn_batch_size", self.dnn_batch_size.to_string());
        put("holdout_weeks", self.holdout_weeks.to_string());
        put("feature_set", self.feature_set.as_str().into());
        put("simulations", self.simulations.to_string());
        put("min_history", self.min_history.to_string());
        put("donors", self.donors.to_string());
        out
    }

    pub fn skipgram(&self) -> SkipGramConfig {
        SkipGramConfig {
            dimension: self.embedding_dim,
            window: self.embedding_window,
            negative_samples: self.embedding_negative,
            epochs: self.embedding_epochs,
            learning_rate: self.embedding_learning_rate,
            seed: self.seed,
            ..SkipGramConfig::default()
        }
    }

    pub fn labels(&self) -> LabelConfig {
        LabelConfig {
            min_owned: self.min_owned,
            bust_direction: self.bust_direction,
        }
    }

    pub fn network(&self, input_dim: usize, activation: crate::classifier::Activation) -> NetworkConfig {
        NetworkConfig::uniform(
            input_dim,
            self.dnn_branch_count,
            self.dnn_dropout,
            self.dnn_branch_layers,
            self.dnn_branch_width,
            self.dnn_trunk_layers,
            self.dnn_trunk_width,
            activation,
        )
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            learning_rate: self.dnn_learning_rate,
            epochs: self.dnn_epochs,
            batch_size: self.dnn_batch_size,
            seed: self.seed,
            ..TrainOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = PipelineConfig::default();
        c.bust_direction = BustDirection::Inverted;
        c.league_terms = vec!["nfl".into(), "football".into()];
        c.dnn_learning_rate = 0.003;
        assert_eq!(PipelineConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(PipelineConfig::parse("nonsense = 1").is_err());
        assert!(PipelineConfig::parse("seed = minus one").is_err());
        assert!(PipelineConfig::parse("just a line").is_err());
        let c = PipelineConfig::parse("# comment\n\nseed = 9\n").unwrap();
        assert_eq!(c.seed, 9);
    }
}
