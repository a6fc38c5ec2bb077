use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::aggregate::{sage_mean_aggregate, sage_mean_aggregate_transpose};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, EdgeGraph};
use crate::matrix::Matrix;
use crate::rng::{self, Stream};

/// `x'_i = W1·x_i + W2·mean_{j∈N(i)} x_j`, weights stored out×in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SageLayer {
    pub w1: Matrix,
    pub w2: Matrix,
}

impl SageLayer {
    pub fn zeros(input: usize, output: usize) -> Self {
        Self {
            w1: Matrix::zeros(output, input),
            w2: Matrix::zeros(output, input),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.w1.rows()
    }

    fn check(&self) -> Result<()> {
        if self.w1.shape() != self.w2.shape() {
            return Err(Error::shape(
                format!("{:?}", self.w1.shape()),
                format!("{:?}", self.w2.shape()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSageModel {
    pub layer1: SageLayer,
    pub layer2: SageLayer,
    pub hidden_dim: usize,
    pub n_classes: usize,
}

impl GraphSageModel {
    pub fn zeros(input: usize, hidden: usize, n_classes: usize) -> Self {
        Self {
            layer1: SageLayer::zeros(input, hidden),
            layer2: SageLayer::zeros(hidden, n_classes),
            hidden_dim: hidden,
            n_classes,
        }
    }

    /// Glorot-uniform weights drawn from the `Init` stream of `seed`, in the
    /// order layer1.w1, layer1.w2, layer2.w1, layer2.w2 (row-major).
    pub fn init(input: usize, hidden: usize, n_classes: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed, Stream::Init);
        let mut model = Self::zeros(input, hidden, n_classes);
        for w in model.params_mut() {
            let a = (6.0 / (w.rows() + w.cols()) as f64).sqrt();
            for v in w.as_mut_slice() {
                *v = rng.gen_range(-a..a);
            }
        }
        model
    }

    pub fn input_dim(&self) -> usize {
        self.layer1.input_dim()
    }

    pub fn params(&self) -> [&Matrix; 4] {
        [&self.layer1.w1, &self.layer1.w2, &self.layer2.w1, &self.layer2.w2]
    }

    pub fn params_mut(&mut self) -> [&mut Matrix; 4] {
        [
            &mut self.layer1.w1,
            &mut self.layer1.w2,
            &mut self.layer2.w1,
            &mut self.layer2.w2,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.layer1.check()?;
        self.layer2.check()?;
        if self.layer1.output_dim() != self.hidden_dim || self.layer2.input_dim() != self.hidden_dim {
            return Err(Error::shape(
                format!("hidden width {}", self.hidden_dim),
                format!(
                    "layer1 out {} / layer2 in {}",
                    self.layer1.output_dim(),
                    self.layer2.input_dim()
                ),
            ));
        }
        if self.layer2.output_dim() != self.n_classes {
            return Err(Error::shape(
                format!("{} classes", self.n_classes),
                format!("layer2 out {}", self.layer2.output_dim()),
            ));
        }
        Ok(())
    }
}

/// Per-parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layer1: SageLayer,
    pub layer2: SageLayer,
}

impl Gradients {
    pub fn as_array(&self) -> [&Matrix; 4] {
        [&self.layer1.w1, &self.layer1.w2, &self.layer2.w1, &self.layer2.w2]
    }
}

/// Everything the backward pass needs from a forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Matrix,
    pub aggregated_input: Matrix,
    pub pre_activation: Matrix,
    pub hidden: Matrix,
    pub logits: Matrix,
}

pub fn relu(x: f64) -> f64 {
    x.max(0.0)
}

pub fn sage_layer_forward(x: &Matrix, adj: &Adjacency, layer: &SageLayer) -> Result<Matrix> {
    layer.check()?;
    let agg = sage_mean_aggregate(x, adj)?;
    let mut out = x.matmul_t(&layer.w1)?;
    out.add_assign(&agg.matmul_t(&layer.w2)?)?;
    Ok(out)
}

/// Logits for every node of `graph`.
pub fn model_forward(model: &GraphSageModel, graph: &EdgeGraph) -> Result<Matrix> {
    Ok(model_forward_cached(model, &graph.features, &graph.adjacency)?.logits)
}

pub fn model_forward_cached(
    model: &GraphSageModel,
    features: &Matrix,
    adj: &Adjacency,
) -> Result<ForwardCache> {
    let agg = sage_mean_aggregate(features, adj)?;
    forward_with_aggregate(model, features, agg, adj)
}

/// Forward pass reusing a precomputed aggregate of the input features.
///
/// The second layer aggregates after its neighbor projection (n×C instead
/// of n×hidden); aggregation is linear so the result is the same map.
pub(crate) fn forward_with_aggregate(
    model: &GraphSageModel,
    features: &Matrix,
    aggregated_input: Matrix,
    adj: &Adjacency,
) -> Result<ForwardCache> {
    model.validate()?;
    if features.cols() != model.input_dim() {
        return Err(Error::shape(
            format!("{} feature columns", model.input_dim()),
            format!("{} columns", features.cols()),
        ));
    }
    let mut pre = features.matmul_t(&model.layer1.w1)?;
    pre.add_assign(&aggregated_input.matmul_t(&model.layer1.w2)?)?;
    let hidden = pre.map(relu);
    let mut logits = hidden.matmul_t(&model.layer2.w1)?;
    let neighbor = sage_mean_aggregate(&hidden.matmul_t(&model.layer2.w2)?, adj)?;
    logits.add_assign(&neighbor)?;
    Ok(ForwardCache {
        input: features.clone(),
        aggregated_input,
        pre_activation: pre,
        hidden,
        logits,
    })
}

/// Argmax class per node, ties to the lower class.
pub fn predict(model: &GraphSageModel, graph: &EdgeGraph) -> Result<Vec<usize>> {
    let logits = model_forward(model, graph)?;
    Ok((0..logits.rows()).map(|i| logits.argmax_row(i)).collect())
}

/// Gradients of the loss whose logit gradient is `dlogits`.
pub fn model_backward(
    model: &GraphSageModel,
    adj: &Adjacency,
    dlogits: &Matrix,
    cache: &ForwardCache,
) -> Result<Gradients> {
    let n = adj.node_count();
    let consistent = cache.input.rows() == n
        && cache.aggregated_input.shape() == cache.input.shape()
        && cache.input.cols() == model.input_dim()
        && cache.pre_activation.shape() == (n, model.hidden_dim)
        && cache.hidden.shape() == (n, model.hidden_dim)
        && cache.logits.shape() == (n, model.n_classes);
    if !consistent {
        return Err(Error::MissingCache(format!(
            "cache holds {} rows / {} hidden, graph has {} nodes / model {} hidden",
            cache.input.rows(),
            cache.hidden.cols(),
            n,
            model.hidden_dim
        )));
    }
    if dlogits.shape() != cache.logits.shape() {
        return Err(Error::shape(
            format!("{:?}", cache.logits.shape()),
            format!("{:?}", dlogits.shape()),
        ));
    }

    // Layer 2: logits = H·V1ᵀ + A·H·V2ᵀ.
    let spread = sage_mean_aggregate_transpose(dlogits, adj)?;
    let dv1 = dlogits.t_matmul(&cache.hidden)?;
    let dv2 = spread.t_matmul(&cache.hidden)?;
    let mut dh = dlogits.matmul(&model.layer2.w1)?;
    dh.add_assign(&spread.matmul(&model.layer2.w2)?)?;

    // ReLU, then layer 1 with the cached aggregate.
    for (g, &z) in dh.as_mut_slice().iter_mut().zip(cache.pre_activation.as_slice()) {
        if z <= 0.0 {
            *g = 0.0;
        }
    }
    let dw1 = dh.t_matmul(&cache.input)?;
    let dw2 = dh.t_matmul(&cache.aggregated_input)?;

    Ok(Gradients {
        layer1: SageLayer { w1: dw1, w2: dw2 },
        layer2: SageLayer { w1: dv1, w2: dv2 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path2() -> Adjacency {
        Adjacency::from_edges(2, &[(0, 1)])
    }

    #[test]
    fn identity_layer_sums_self_and_neighbor() {
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let layer = SageLayer {
            w1: Matrix::identity(2),
            w2: Matrix::identity(2),
        };
        let out = sage_layer_forward(&x, &path2(), &layer).unwrap();
        assert_eq!(out.row(0), &[1.0, 1.0]);
        assert_eq!(out.row(1), &[1.0, 1.0]);
    }

    #[test]
    fn zero_neighbor_weight_is_linear() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, -1.0]]);
        let layer = SageLayer {
            w1: Matrix::from_rows(&[[0.5, -1.0]]),
            w2: Matrix::zeros(1, 2),
        };
        let out = sage_layer_forward(&x, &path2(), &layer).unwrap();
        assert_eq!(out, x.matmul_t(&layer.w1).unwrap());
    }

    #[test]
    fn zero_model_predicts_class_zero() {
        let model = GraphSageModel::zeros(2, 3, 2);
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, -1.0]]);
        let cache = model_forward_cached(&model, &x, &path2()).unwrap();
        assert!(cache.logits.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(cache.logits.argmax_row(0), 0);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = GraphSageModel::init(13, 8, 2, 1);
        assert_eq!(a, GraphSageModel::init(13, 8, 2, 1));
        assert_ne!(a, GraphSageModel::init(13, 8, 2, 2));
        let bound = (6.0f64 / 21.0).sqrt();
        assert!(a.layer1.w1.as_slice().iter().all(|v| v.abs() < bound));
        a.validate().unwrap();
    }

    #[test]
    fn backward_rejects_foreign_cache() {
        let model = GraphSageModel::zeros(2, 3, 2);
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, -1.0]]);
        let cache = model_forward_cached(&model, &x, &path2()).unwrap();
        let other = Adjacency::from_edges(3, &[(0, 1)]);
        assert!(matches!(
            model_backward(&model, &other, &Matrix::zeros(3, 2), &cache),
            Err(Error::MissingCache(_))
        ));
    }
}
