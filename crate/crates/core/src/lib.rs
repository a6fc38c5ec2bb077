//! Predicting pairwise microbial interactions with GraphSAGE on an
//! experiment graph.
//!
//! Pipeline: [`synth`] or [`data::ingest_csv`] produce a [`data::Dataset`];
//! [`features`] turns each record into a 13-dimensional vector; [`graph`]
//! builds the line graph over co-culture experiments; [`nn`] trains the
//! model; [`baselines`] and [`eval`] provide comparisons and metrics.

pub mod baselines;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod matrix;
pub mod nn;
pub mod pca;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
