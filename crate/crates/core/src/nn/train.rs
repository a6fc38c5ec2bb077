use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::aggregate::sage_mean_aggregate;
use super::loss::softmax_cross_entropy;
use super::model::{forward_with_aggregate, model_backward, GraphSageModel};
use crate::error::{Error, Result};
use crate::graph::EdgeGraph;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub hidden_dim: usize,
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            lr: 1e-2,
            hidden_dim: 64,
            seed: 42,
            train_fraction: 0.8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::InvalidConfig(format!("lr must be positive, got {}", self.lr)));
        }
        if self.hidden_dim == 0 {
            return Err(Error::InvalidConfig("hidden_dim must be at least 1".into()));
        }
        if !self.train_fraction.is_finite() {
            return Err(Error::InvalidConfig("train_fraction must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: GraphSageModel,
    pub history: Vec<EpochStats>,
}

/// Fraction of masked nodes whose argmax logit equals the label; 0 for an
/// empty mask.
pub fn accuracy(logits: &Matrix, labels: &[usize], mask: &[bool]) -> f64 {
    let mut hit = 0usize;
    let mut total = 0usize;
    for i in (0..labels.len()).filter(|&i| mask[i]) {
        total += 1;
        if logits.argmax_row(i) == labels[i] {
            hit += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

/// Full-batch transductive training: every epoch runs the whole graph
/// forward, takes the loss on training nodes only and applies one Adam step.
/// History entries describe the weights the epoch started from.
pub fn train(graph: &EdgeGraph, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if !graph.train_mask.iter().any(|&m| m) {
        return Err(Error::EmptyMask);
    }
    let mut model = GraphSageModel::init(
        graph.features.cols(),
        config.hidden_dim,
        graph.n_classes,
        config.seed,
    );
    let mut adam = AdamState::new(&model, config.lr);
    let aggregated = sage_mean_aggregate(&graph.features, &graph.adjacency)?;
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let cache = forward_with_aggregate(&model, &graph.features, aggregated.clone(), &graph.adjacency)?;
        let (loss, dlogits) = softmax_cross_entropy(&cache.logits, &graph.labels, &graph.train_mask)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss });
        }
        history.push(EpochStats {
            epoch,
            loss,
            train_accuracy: accuracy(&cache.logits, &graph.labels, &graph.train_mask),
            test_accuracy: accuracy(&cache.logits, &graph.labels, &graph.test_mask),
        });
        let grads = model_backward(&model, &graph.adjacency, &dlogits, &cache)?;
        adam_step(&mut model, &grads, &mut adam)?;
    }
    Ok(TrainOutcome { model, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        TrainConfig::default().validate().unwrap();
        let bad = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn accuracy_counts_masked_rows() {
        let logits = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(accuracy(&logits, &[0, 0, 0], &[true, true, false]), 0.5);
        assert_eq!(accuracy(&logits, &[0, 0, 0], &[false; 3]), 0.0);
    }
}
