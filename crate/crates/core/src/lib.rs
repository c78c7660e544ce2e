//! Fantasy football language-understanding and projection pipeline.
//!
//! Documents are retrieved per player-week, annotated with a 13-type entity
//! ontology, summarized into keyword/concept/entity term sets and embedded.
//! Four deep classifiers turn the embedding, bio and sentiment features into
//! boom/bust/injury/meaningful-touches probabilities, a per-position linear
//! ensemble combines them with the baseline projection, and a best-fit score
//! distribution supplies the percentile band shown to users.

pub mod annotation;
pub mod classifier;
pub mod config;
pub mod corpus;
pub mod distribution;
pub mod embedding;
pub mod error;
pub mod insights;
pub mod labeling;
pub mod pipeline;
pub mod projection;
pub mod roster;
pub mod synth;
pub mod table;
pub mod text;

pub use error::{Error, Result};
