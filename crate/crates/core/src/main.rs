use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use microsage::config::{Overrides, RunConfig};
use microsage::graph::Task;
use microsage::pipeline::{run_pipeline, Stage};

#[derive(Parser)]
#[command(name = "microsage", version, about = "Microbial interaction prediction with GraphSAGE")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_parser = parse_task)]
    task: Option<Task>,

    #[arg(long, global = true)]
    epochs: Option<usize>,

    #[arg(long, global = true)]
    lr: Option<f64>,

    #[arg(long, global = true)]
    hidden: Option<usize>,

    #[arg(long = "knn-k", global = true)]
    knn_k: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate (or ingest) the dataset.
    Synth,
    /// Write the per-record feature table.
    Featurize,
    /// Build the edge-graph with its train/test masks.
    BuildGraph,
    /// Train GraphSAGE and save a checkpoint.
    Train,
    /// Score the saved checkpoint on the test split.
    Evaluate,
    /// Train GraphSAGE, kNN and GBDT on one split and report all three.
    Compare,
    /// Every stage in order.
    All,
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: microsage::Error| e.to_string())
}

fn run(cli: Cli) -> microsage::Result<()> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = base.resolve(&Overrides {
        out_dir: cli.out,
        seed: cli.seed,
        task: cli.task,
        epochs: cli.epochs,
        lr: cli.lr,
        hidden: cli.hidden,
        knn_k: cli.knn_k,
    })?;
    let stage = match cli.command {
        Command::Synth => Stage::Synth,
        Command::Featurize => Stage::Featurize,
        Command::BuildGraph => Stage::BuildGraph,
        Command::Train => Stage::Train,
        Command::Evaluate => Stage::Evaluate,
        Command::Compare => Stage::Compare,
        Command::All => Stage::All,
    };
    let out = run_pipeline(&config, stage)?;
    for path in &out.written {
        println!("wrote {}", path.display());
    }
    for r in &out.reports {
        let m = &r.metrics;
        match &m.binary {
            Some(b) => println!(
                "{:<10} accuracy {:.4}  sensitivity {:.4}  precision {:.4}  f1 {:.4}",
                r.name, m.accuracy, b.sensitivity, b.precision, b.f1
            ),
            None => println!("{:<10} accuracy {:.4}  macro-f1 {:.4}", r.name, m.accuracy, m.macro_f1),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
