//! Run configuration: JSON file, command-line overrides, defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{GbdtConfig, DEFAULT_K};
use crate::error::{Error, Result};
use crate::graph::Task;
use crate::nn::TrainConfig;
use crate::synth::WorldConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DataSource {
    Synth {
        #[serde(default)]
        world: WorldConfig,
    },
    Csv {
        records: PathBuf,
        phylo: PathBuf,
    },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synth {
            world: WorldConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureOptions {
    /// Minimum co-culture gain counted as a positive effect.
    pub epsilon: f64,
    pub standardize: bool,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineOptions {
    pub knn_k: usize,
    pub gbdt: GbdtConfig,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self {
            knn_k: DEFAULT_K,
            gbdt: GbdtConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub data: DataSource,
    pub features: FeatureOptions,
    pub model: TrainConfig,
    pub baselines: BaselineOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            task: Task::OneWay,
            seed: 42,
            out_dir: PathBuf::from("out"),
            data: DataSource::default(),
            features: FeatureOptions::default(),
            model: TrainConfig::default(),
            baselines: BaselineOptions::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub task: Option<Task>,
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub hidden: Option<usize>,
    pub knn_k: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        Self::from_json(&text)
    }

    /// Applies overrides, then copies the run seed into every seeded section
    /// and validates.
    pub fn resolve(mut self, overrides: &Overrides) -> Result<Self> {
        if let Some(v) = &overrides.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = overrides.seed {
            self.seed = v;
        }
        if let Some(v) = overrides.task {
            self.task = v;
        }
        if let Some(v) = overrides.epochs {
            self.model.epochs = v;
        }
        if let Some(v) = overrides.lr {
            self.model.lr = v;
        }
        if let Some(v) = overrides.hidden {
            self.model.hidden_dim = v;
        }
        if let Some(v) = overrides.knn_k {
            self.baselines.knn_k = v;
        }
        self.model.seed = self.seed;
        if let DataSource::Synth { world } = &mut self.data {
            world.seed = self.seed;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if let DataSource::Synth { world } = &self.data {
            world.validate()?;
        }
        self.model.validate()?;
        self.baselines.gbdt.validate()?;
        if self.baselines.knn_k == 0 {
            return Err(Error::InvalidConfig("knn_k must be at least 1".into()));
        }
        if !(self.features.epsilon.is_finite() && self.features.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and >= 0, got {}",
                self.features.epsilon
            )));
        }
        Ok(())
    }

    /// Config as echoed into artifacts. The output directory is left out so
    /// that identical runs in different places produce identical files.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or_default();
        if let Some(map) = v.as_object_mut() {
            map.remove("out_dir");
        }
        v
    }

    /// Short content hash of [`RunConfig::echo`].
    pub fn run_id(&self) -> String {
        let digest = Sha256::digest(self.echo().to_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_json(r#"{"epochz": 3}"#),
            Err(Error::ConfigParse(_))
        ));
        assert!(RunConfig::from_json(r#"{"model": {"epochz": 3}}"#).is_err());
    }

    #[test]
    fn csv_source() {
        let cfg = RunConfig::from_json(
            r#"{"data": {"source": "csv", "records": "r.csv", "phylo": "p.csv"}, "task": "two-way"}"#,
        )
        .unwrap();
        assert_eq!(cfg.task, Task::TwoWay);
        assert!(matches!(cfg.data, DataSource::Csv { .. }));
    }

    #[test]
    fn flags_beat_file_and_seed_propagates() {
        let cfg = RunConfig::from_json(r#"{"seed": 3, "model": {"epochs": 10, "seed": 99}}"#).unwrap();
        let resolved = cfg
            .resolve(&Overrides {
                seed: Some(5),
                epochs: Some(20),
                ..Overrides::default()
            })
            .unwrap();
        assert_eq!(resolved.model.epochs, 20);
        assert_eq!(resolved.model.seed, 5);
        let DataSource::Synth { world } = &resolved.data else { panic!() };
        assert_eq!(world.seed, 5);
    }

    #[test]
    fn run_id_ignores_out_dir() {
        let a = RunConfig::default();
        let b = RunConfig {
            out_dir: "elsewhere".into(),
            ..RunConfig::default()
        };
        assert_eq!(a.run_id(), b.run_id());
        let c = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_ne!(a.run_id(), c.run_id());
    }
}
