//! End-to-end stages. Each stage reads its inputs from and writes its
//! artifacts to the run's output directory; [`Stage::All`] chains them.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::baselines::{GbdtModel, KnnModel};
use crate::config::{DataSource, RunConfig};
use crate::data::{ingest_csv, split_train_test, Dataset, Split};
use crate::error::{Error, Result};
use crate::eval::{comment_line, emit_report, ModelReport, RunMeta};
use crate::features::{build_feature_context, fit_standardizer, write_features_csv, FeatureContext, Standardizer};
use crate::graph::{build_interaction_graph, to_edge_graph, EdgeGraph, Task};
use crate::nn::{self, load_checkpoint, save_checkpoint, GraphSageModel, TrainConfig, TrainOutcome};
use crate::synth::synthesize;

pub const DATASET_FILE: &str = "dataset.csv";
pub const PHYLO_FILE: &str = "phylo.csv";
pub const FEATURES_FILE: &str = "features.csv";
pub const GRAPH_FILE: &str = "graph.json";
pub const MODEL_FILE: &str = "model.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const COMPARE_JSON: &str = "compare.json";
pub const COMPARE_CSV: &str = "compare.csv";

pub const GRAPHSAGE: &str = "graphsage";
pub const KNN: &str = "knn";
pub const GBDT: &str = "gbdt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Synth,
    Featurize,
    BuildGraph,
    Train,
    Evaluate,
    Compare,
    All,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Featurize => "featurize",
            Stage::BuildGraph => "build-graph",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Compare => "compare",
            Stage::All => "all",
        }
    }
}

/// Edge-graph ready for training: standardized features and record-level
/// split applied to the node masks.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub context: FeatureContext,
    pub graph: EdgeGraph,
    pub split: Split,
    pub standardizer: Option<Standardizer>,
}

/// Featurizes, builds the edge-graph for `task`, splits records with
/// `seed` and (optionally) standardizes with statistics of training nodes.
pub fn prepare(
    dataset: &Dataset,
    task: Task,
    seed: u64,
    train_fraction: f64,
    standardize: bool,
) -> Result<Prepared> {
    let context = build_feature_context(dataset)?;
    let interaction = build_interaction_graph(dataset);
    let mut graph = to_edge_graph(&interaction, dataset, &context, task)?;
    let split = split_train_test(dataset.records().len(), train_fraction, seed)?;
    graph.apply_record_split(&split)?;
    let standardizer = if standardize {
        let s = fit_standardizer(&graph.features, &graph.train_mask)?;
        s.apply_matrix(&mut graph.features)?;
        Some(s)
    } else {
        None
    };
    Ok(Prepared {
        context,
        graph,
        split,
        standardizer,
    })
}

impl Prepared {
    fn test_truths(&self) -> Vec<usize> {
        self.graph.masked_rows(&self.graph.test_mask).1
    }
}

pub fn train_graphsage(prepared: &Prepared, config: &TrainConfig) -> Result<TrainOutcome> {
    nn::train(&prepared.graph, config)
}

/// Test-node report for a trained GNN.
pub fn evaluate_graphsage(model: &GraphSageModel, prepared: &Prepared) -> Result<ModelReport> {
    let g = &prepared.graph;
    if model.n_classes != g.n_classes || model.input_dim() != g.features.cols() {
        return Err(Error::shape(
            format!("model for {} features / {} classes", g.features.cols(), g.n_classes),
            format!("{} / {}", model.input_dim(), model.n_classes),
        ));
    }
    let predictions = nn::predict(model, g)?;
    let test: Vec<usize> = (0..g.node_count())
        .filter(|&i| g.test_mask[i])
        .map(|i| predictions[i])
        .collect();
    ModelReport::new(GRAPHSAGE, g.task, &test, &prepared.test_truths())
}

pub fn evaluate_knn(prepared: &Prepared, k: usize) -> Result<ModelReport> {
    let g = &prepared.graph;
    let (x_train, y_train) = g.masked_rows(&g.train_mask);
    let (x_test, y_test) = g.masked_rows(&g.test_mask);
    let model = KnnModel::fit(x_train, y_train, k, g.n_classes)?;
    ModelReport::new(KNN, g.task, &model.predict(&x_test)?, &y_test)
}

pub fn evaluate_gbdt(prepared: &Prepared, config: &crate::baselines::GbdtConfig) -> Result<(GbdtModel, ModelReport)> {
    let g = &prepared.graph;
    let (x_train, y_train) = g.masked_rows(&g.train_mask);
    let (x_test, y_test) = g.masked_rows(&g.test_mask);
    let model = GbdtModel::train(&x_train, &y_train, g.n_classes, config)?;
    let report = ModelReport::new(GBDT, g.task, &model.predict(&x_test), &y_test)?;
    Ok((model, report))
}

/// GraphSAGE, kNN and GBDT on one shared split. Pass `model` to skip
/// GraphSAGE training.
pub fn compare_models(
    prepared: &Prepared,
    config: &RunConfig,
    model: Option<&GraphSageModel>,
) -> Result<Vec<ModelReport>> {
    let trained;
    let model = match model {
        Some(m) => m,
        None => {
            trained = train_graphsage(prepared, &config.model)?.model;
            &trained
        }
    };
    Ok(vec![
        evaluate_graphsage(model, prepared)?,
        evaluate_knn(prepared, config.baselines.knn_k)?,
        evaluate_gbdt(prepared, &config.baselines.gbdt)?.1,
    ])
}

/// Paths written and reports produced by a stage.
#[derive(Debug, Clone, Default)]
pub struct StageOutput {
    pub written: Vec<PathBuf>,
    pub reports: Vec<ModelReport>,
}

struct Run<'a> {
    config: &'a RunConfig,
    meta: RunMeta,
    out: StageOutput,
}

impl<'a> Run<'a> {
    fn new(config: &'a RunConfig) -> Result<Self> {
        fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
        Ok(Self {
            config,
            meta: RunMeta {
                run_id: config.run_id(),
                seed: config.seed,
                config_echo: config.echo(),
            },
            out: StageOutput::default(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.config.out_dir.join(name)
    }

    fn comment(&self) -> String {
        comment_line(&self.meta)
    }

    fn meta_json(&self) -> serde_json::Value {
        json!({
            "run_id": self.meta.run_id,
            "seed": self.meta.seed,
            "config_echo": self.meta.config_echo,
        })
    }

    fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.out.written.push(path);
        Ok(())
    }

    fn open(&self, name: &str) -> Result<fs::File> {
        let path = self.path(name);
        fs::File::open(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingInput(path.clone()),
            _ => Error::io(&path, e),
        })
    }

    fn load_dataset(&self) -> Result<Dataset> {
        ingest_csv(
            self.open(DATASET_FILE)?,
            self.open(PHYLO_FILE)?,
            self.config.features.epsilon,
        )
    }

    fn prepare(&self, dataset: &Dataset) -> Result<Prepared> {
        prepare(
            dataset,
            self.config.task,
            self.config.seed,
            self.config.model.train_fraction,
            self.config.features.standardize,
        )
    }

    fn synth(&mut self) -> Result<Dataset> {
        let eps = self.config.features.epsilon;
        let dataset = match &self.config.data {
            DataSource::Synth { world } => synthesize(world)?.1.relabel(eps)?,
            DataSource::Csv { records, phylo } => {
                let open = |p: &Path| {
                    fs::File::open(p).map_err(|e| match e.kind() {
                        std::io::ErrorKind::NotFound => Error::MissingInput(p.to_path_buf()),
                        _ => Error::io(p, e),
                    })
                };
                ingest_csv(open(records)?, open(phylo)?, eps)?
            }
        };
        let comment = self.comment();
        let mut buf = Vec::new();
        dataset.write_records_csv(&mut buf, Some(&comment))?;
        self.write(DATASET_FILE, buf)?;
        let mut buf = Vec::new();
        dataset.write_phylo_csv(&mut buf, Some(&comment))?;
        self.write(PHYLO_FILE, buf)?;
        Ok(dataset)
    }

    fn featurize(&mut self, dataset: &Dataset) -> Result<()> {
        let ctx = build_feature_context(dataset)?;
        let mut buf = Vec::new();
        write_features_csv(dataset, &ctx, &mut buf, Some(&self.comment()))?;
        self.write(FEATURES_FILE, buf)
    }

    fn build_graph(&mut self, prepared: &Prepared) -> Result<()> {
        let mut buf = Vec::new();
        prepared.graph.write_json(&mut buf, self.meta_json())?;
        self.write(GRAPH_FILE, buf)
    }

    fn train(&mut self, prepared: &Prepared) -> Result<GraphSageModel> {
        let outcome = train_graphsage(prepared, &self.config.model)?;
        let mut buf = Vec::new();
        save_checkpoint(&outcome.model, self.config.seed, self.meta_json(), &mut buf)?;
        self.write(MODEL_FILE, buf)?;
        let mut hist = format!("# {}\nepoch,loss,train_accuracy,test_accuracy\n", self.comment());
        for h in &outcome.history {
            hist.push_str(&format!(
                "{},{},{},{}\n",
                h.epoch, h.loss, h.train_accuracy, h.test_accuracy
            ));
        }
        self.write(HISTORY_FILE, hist.into_bytes())?;
        Ok(outcome.model)
    }

    fn load_model(&self) -> Result<GraphSageModel> {
        Ok(load_checkpoint(std::io::BufReader::new(self.open(MODEL_FILE)?))?.model)
    }

    fn emit(&mut self, reports: Vec<ModelReport>, json_name: &str, csv_name: &str) -> Result<()> {
        let (mut j, mut c) = (Vec::new(), Vec::new());
        emit_report(&reports, &self.meta, &mut j, &mut c)?;
        self.write(json_name, j)?;
        self.write(csv_name, c)?;
        self.out.reports.extend(reports);
        Ok(())
    }
}

/// Runs one stage (or all of them) for `config`.
pub fn run_pipeline(config: &RunConfig, stage: Stage) -> Result<StageOutput> {
    config.validate()?;
    let mut run = Run::new(config)?;
    match stage {
        Stage::Synth => {
            run.synth()?;
        }
        Stage::Featurize => {
            let d = run.load_dataset()?;
            run.featurize(&d)?;
        }
        Stage::BuildGraph => {
            let p = run.prepare(&run.load_dataset()?)?;
            run.build_graph(&p)?;
        }
        Stage::Train => {
            let p = run.prepare(&run.load_dataset()?)?;
            run.train(&p)?;
        }
        Stage::Evaluate => {
            let p = run.prepare(&run.load_dataset()?)?;
            let model = run.load_model()?;
            let report = evaluate_graphsage(&model, &p)?;
            run.emit(vec![report], REPORT_JSON, REPORT_CSV)?;
        }
        Stage::Compare => {
            let p = run.prepare(&run.load_dataset()?)?;
            let reports = compare_models(&p, config, None)?;
            run.emit(reports, COMPARE_JSON, COMPARE_CSV)?;
        }
        Stage::All => {
            run.synth()?;
            // Downstream stages read the dataset back from disk, as they
            // would when run on their own.
            let d = run.load_dataset()?;
            run.featurize(&d)?;
            let p = run.prepare(&d)?;
            run.build_graph(&p)?;
            let model = run.train(&p)?;
            let model_back = run.load_model()?;
            debug_assert_eq!(model, model_back);
            let report = evaluate_graphsage(&model_back, &p)?;
            run.emit(vec![report], REPORT_JSON, REPORT_CSV)?;
            let reports = compare_models(&p, config, Some(&model_back))?;
            run.emit(reports, COMPARE_JSON, COMPARE_CSV)?;
        }
    }
    Ok(run.out)
}
