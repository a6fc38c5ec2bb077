use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("duplicate record for pair ({species_x}, {species_y}) under condition {condition}")]
    DuplicatePair {
        species_x: String,
        species_y: String,
        condition: String,
    },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unknown condition `{0}`")]
    UnknownCondition(String),

    #[error("phylogenetic matrix is asymmetric at ({row}, {col}): {forward} vs {backward}")]
    AsymmetricPhylo {
        row: usize,
        col: usize,
        forward: f64,
        backward: f64,
    },

    #[error("monoculture yields for species `{species}` under `{condition}` disagree across records")]
    InconsistentProfile { species: String, condition: String },

    #[error("negative yield {0}")]
    NegativeYield(f64),

    #[error("degenerate split: {train} train / {test} test out of {n}")]
    DegenerateSplit { n: usize, train: usize, test: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("too few rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("interaction graph has no edges")]
    EmptyGraph,

    #[error("loss mask selects no nodes")]
    EmptyMask,

    #[error("forward cache does not match this model/graph: {0}")]
    MissingCache(String),

    #[error("loss became non-finite at epoch {epoch} (loss = {loss})")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("model has no training rows")]
    EmptyModel,

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("missing input {}", .0.display())]
    MissingInput(PathBuf),

    #[error("i/o failure on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, actual: impl ToString) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
