//! Two-layer mean-aggregation GraphSAGE with a hand-written backward pass.

mod adam;
mod aggregate;
mod checkpoint;
mod loss;
mod model;
mod train;

pub use crate::matrix::Matrix;
pub use adam::{adam_step, adam_update, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use aggregate::{sage_mean_aggregate, sage_mean_aggregate_transpose};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use loss::{softmax_cross_entropy, softmax_row};
pub use model::{
    model_backward, model_forward, model_forward_cached, predict, relu, sage_layer_forward,
    ForwardCache, Gradients, GraphSageModel, SageLayer,
};
pub use train::{accuracy, train, EpochStats, TrainConfig, TrainOutcome};
