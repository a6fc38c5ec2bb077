use std::fs;
use std::path::Path;

use microsage::config::{DataSource, Overrides, RunConfig};
use microsage::nn::{load_checkpoint, predict, save_checkpoint};
use microsage::pipeline::*;

fn quick_config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig {
        out_dir: dir.to_path_buf(),
        ..RunConfig::default()
    };
    cfg.model.epochs = 15;
    cfg.model.hidden_dim = 16;
    cfg.resolve(&Overrides::default()).unwrap()
}

#[test]
fn shipped_default_config_matches_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let file = RunConfig::load(&path).unwrap().resolve(&Overrides::default()).unwrap();
    let builtin = RunConfig::default().resolve(&Overrides::default()).unwrap();
    assert_eq!(file, builtin);
}

#[test]
fn stages_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    for stage in [
        Stage::Synth,
        Stage::Featurize,
        Stage::BuildGraph,
        Stage::Train,
        Stage::Evaluate,
        Stage::Compare,
    ] {
        let first = run_pipeline(&cfg, stage).unwrap();
        let before: Vec<Vec<u8>> = first.written.iter().map(|p| fs::read(p).unwrap()).collect();
        let second = run_pipeline(&cfg, stage).unwrap();
        assert_eq!(first.written, second.written);
        for (p, bytes) in second.written.iter().zip(&before) {
            assert!(&fs::read(p).unwrap() == bytes, "{} changed on rerun of {}", p.display(), stage.name());
        }
    }
}

#[test]
fn every_artifact_embeds_config_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let out = run_pipeline(&cfg, Stage::All).unwrap();
    let echo = cfg.echo();
    assert_eq!(out.written.len(), 10);
    for path in &out.written {
        let text = fs::read_to_string(path).unwrap();
        let name = path.file_name().unwrap().to_str().unwrap();
        if name.ends_with(".csv") {
            let first = text.lines().next().unwrap();
            let rest = first
                .strip_prefix(&format!("# run_id={} seed={} config=", cfg.run_id(), cfg.seed))
                .unwrap_or_else(|| panic!("{name}: {first}"));
            let parsed: serde_json::Value = serde_json::from_str(rest).unwrap();
            assert_eq!(parsed, echo, "{name}");
        } else {
            let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
            let meta = doc.get("meta").unwrap_or(&doc);
            assert_eq!(meta["seed"], cfg.seed, "{name}");
            assert_eq!(meta["run_id"], cfg.run_id(), "{name}");
            // Reports round floats, so compare after a canonical round trip.
            let mut want = Vec::new();
            microsage::eval::write_canonical_json(&echo, &mut want).unwrap();
            let mut got = Vec::new();
            microsage::eval::write_canonical_json(&meta["config_echo"], &mut got).unwrap();
            assert_eq!(got, want, "{name}");
        }
    }
    // The echo alone reconstructs the run.
    let rebuilt: RunConfig = serde_json::from_value(echo).unwrap();
    assert_eq!(
        RunConfig {
            out_dir: cfg.out_dir.clone(),
            ..rebuilt
        },
        cfg
    );
}

#[test]
fn checkpoint_reload_predicts_identically() {
    let (_, ds) = microsage::synth::synthesize(&Default::default()).unwrap();
    let prepared = prepare(&ds, microsage::graph::Task::OneWay, 7, 0.8, true).unwrap();
    let cfg = microsage::nn::TrainConfig {
        epochs: 20,
        hidden_dim: 16,
        seed: 7,
        ..Default::default()
    };
    let model = train_graphsage(&prepared, &cfg).unwrap().model;
    let mut buf = Vec::new();
    save_checkpoint(&model, 7, serde_json::json!({"note": "x"}), &mut buf).unwrap();
    let loaded = load_checkpoint(buf.as_slice()).unwrap();
    assert_eq!(loaded.model, model);
    assert_eq!(loaded.seed, 7);
    assert_eq!(
        predict(&loaded.model, &prepared.graph).unwrap(),
        predict(&model, &prepared.graph).unwrap()
    );
}

#[test]
fn corrupt_checkpoint_is_rejected() {
    assert!(load_checkpoint(&b"{\"format\": \"something-else\"}"[..]).is_err());
    assert!(load_checkpoint(&b"not json"[..]).is_err());
}

#[test]
fn csv_source_round_trips_through_the_pipeline() {
    let first = tempfile::tempdir().unwrap();
    run_pipeline(&quick_config(first.path()), Stage::Synth).unwrap();
    let second = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        out_dir: second.path().to_path_buf(),
        data: DataSource::Csv {
            records: first.path().join(DATASET_FILE),
            phylo: first.path().join(PHYLO_FILE),
        },
        ..quick_config(second.path())
    };
    run_pipeline(&cfg, Stage::Synth).unwrap();
    let body = |p: &Path| -> String {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(
        body(&first.path().join(DATASET_FILE)),
        body(&second.path().join(DATASET_FILE))
    );
    let missing = RunConfig {
        data: DataSource::Csv {
            records: "/nonexistent/records.csv".into(),
            phylo: "/nonexistent/phylo.csv".into(),
        },
        ..cfg
    };
    assert!(matches!(
        run_pipeline(&missing, Stage::Synth),
        Err(microsage::Error::MissingInput(_))
    ));
}
