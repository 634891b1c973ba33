//! Compositional reader for political discourse.
//!
//! The pipeline turns a corpus of tweets, press releases, perspectives, news
//! and encyclopedia articles into typed discourse graphs, encodes each node's
//! documents with a bidirectional LSTM over pooled sentence embeddings,
//! composes node representations with adjacency-masked multi-head attention
//! and trains the whole stack with two self-supervised link-prediction tasks.
//! The learned author, issue and entity embeddings feed grade paraphrase,
//! grade prediction, opinion descriptors and projections.

pub mod composer;
pub mod corpus;
pub mod embeddings;
pub mod encoder;
pub mod error;
pub mod evaluation;
pub mod graphgen;
pub mod learning;
pub mod params;
pub mod synthetic;
mod tensor;

pub use error::{Error, Result};
pub use params::Parameters;
pub use tensor::cosine;
