use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::model::GraphSageModel;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "microsage-graphsage-v1";

/// On-disk model: dims, seed and row-major weights. Floats round-trip
/// exactly, so a loaded model predicts bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub seed: u64,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub n_classes: usize,
    /// Free-form run metadata (config echo).
    #[serde(default)]
    pub meta: serde_json::Value,
    pub model: GraphSageModel,
}

pub fn save_checkpoint<W: Write>(
    model: &GraphSageModel,
    seed: u64,
    meta: serde_json::Value,
    out: W,
) -> Result<()> {
    let ckpt = Checkpoint {
        format: CHECKPOINT_FORMAT.into(),
        seed,
        input_dim: model.input_dim(),
        hidden_dim: model.hidden_dim,
        n_classes: model.n_classes,
        meta,
        model: model.clone(),
    };
    serde_json::to_writer(out, &ckpt)?;
    Ok(())
}

pub fn load_checkpoint<R: Read>(input: R) -> Result<Checkpoint> {
    let ckpt: Checkpoint = serde_json::from_reader(input)?;
    if ckpt.format != CHECKPOINT_FORMAT {
        return Err(Error::ConfigParse(format!("unknown checkpoint format `{}`", ckpt.format)));
    }
    ckpt.model.validate()?;
    for p in ckpt.model.params() {
        if p.as_slice().len() != p.rows() * p.cols() {
            return Err(Error::shape(format!("{}x{}", p.rows(), p.cols()), p.as_slice().len()));
        }
        if !p.is_finite() {
            return Err(Error::NonFinite("checkpoint weights"));
        }
    }
    if ckpt.model.input_dim() != ckpt.input_dim
        || ckpt.model.hidden_dim != ckpt.hidden_dim
        || ckpt.model.n_classes != ckpt.n_classes
    {
        return Err(Error::shape(
            format!("{}/{}/{}", ckpt.input_dim, ckpt.hidden_dim, ckpt.n_classes),
            "weights of another shape",
        ));
    }
    Ok(ckpt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let model = GraphSageModel::init(13, 8, 3, 9);
        let mut buf = Vec::new();
        save_checkpoint(&model, 9, serde_json::Value::Null, &mut buf).unwrap();
        let back = load_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back.model, model);
        assert_eq!(back.seed, 9);
    }

    #[test]
    fn rejects_inconsistent_dims() {
        let model = GraphSageModel::init(13, 8, 3, 9);
        let mut buf = Vec::new();
        save_checkpoint(&model, 9, serde_json::Value::Null, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("\"n_classes\":3", "\"n_classes\":2");
        assert!(load_checkpoint(text.as_bytes()).is_err());
    }
}
