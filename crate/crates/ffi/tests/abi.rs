use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use microsage_ffi::*;

fn last_error() -> String {
    let p = ms_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_world() -> CString {
    CString::new(r#"{"species_count": 6, "condition_count": 4, "seed": 3}"#).unwrap()
}

#[test]
fn dataset_lifecycle() {
    let mut ds = ptr::null_mut();
    let world = small_world();
    assert_eq!(unsafe { ms_dataset_synthesize(world.as_ptr(), &mut ds) }, MsStatus::Ok);
    assert!(ms_last_error().is_null());

    let mut n = 0usize;
    assert_eq!(unsafe { ms_dataset_record_count(ds, &mut n) }, MsStatus::Ok);
    assert_eq!(n, 15 * 4);
    let mut counts = [0usize; 3];
    assert_eq!(unsafe { ms_dataset_two_way_counts(ds, counts.as_mut_ptr()) }, MsStatus::Ok);
    assert_eq!(counts.iter().sum::<usize>(), n);
    unsafe { ms_dataset_free(ds) };
}

#[test]
fn null_and_bad_arguments() {
    let mut n = 0usize;
    assert_eq!(unsafe { ms_dataset_record_count(ptr::null(), &mut n) }, MsStatus::NullPointer);
    assert!(last_error().contains("dataset"));

    let bad = CString::new(r#"{"species_count": "many"}"#).unwrap();
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { ms_dataset_synthesize(bad.as_ptr(), &mut ds) }, MsStatus::Parse);
    assert!(ds.is_null());

    let missing = CString::new("/nonexistent/records.csv").unwrap();
    assert_eq!(
        unsafe { ms_dataset_load_csv(missing.as_ptr(), missing.as_ptr(), 0.0, &mut ds) },
        MsStatus::Io
    );
    assert!(last_error().contains("missing input"));

    let stage = CString::new("bake").unwrap();
    assert_eq!(
        unsafe { ms_run_pipeline(ptr::null(), stage.as_ptr(), ptr::null()) },
        MsStatus::InvalidArgument
    );
    unsafe {
        ms_dataset_free(ptr::null_mut());
        ms_model_free(ptr::null_mut());
    }
}

#[test]
fn train_predict_evaluate() {
    let mut ds = ptr::null_mut();
    let world = small_world();
    assert_eq!(unsafe { ms_dataset_synthesize(world.as_ptr(), &mut ds) }, MsStatus::Ok);
    let cfg = CString::new(r#"{"model": {"epochs": 20, "hidden_dim": 8}}"#).unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { ms_model_train(ds, cfg.as_ptr(), &mut model) }, MsStatus::Ok);

    let mut nodes = 0usize;
    assert_eq!(unsafe { ms_model_node_count(model, &mut nodes) }, MsStatus::Ok);
    assert_eq!(nodes, 2 * 60);
    let mut labels = vec![9usize; nodes];
    assert_eq!(
        unsafe { ms_model_predict(model, labels.as_mut_ptr(), nodes - 1) },
        MsStatus::BufferTooSmall
    );
    assert_eq!(unsafe { ms_model_predict(model, labels.as_mut_ptr(), nodes) }, MsStatus::Ok);
    assert!(labels.iter().all(|&l| l < 2));

    let mut metrics = MsMetrics::default();
    assert_eq!(unsafe { ms_model_evaluate(model, &mut metrics) }, MsStatus::Ok);
    assert!((0.0..=1.0).contains(&metrics.accuracy));
    assert_eq!(metrics.test_count, 2 * 12);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.json").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { ms_model_save(model, path.as_ptr()) }, MsStatus::Ok);
    assert!(dir.path().join("m.json").exists());
    unsafe {
        ms_model_free(model);
        ms_dataset_free(ds);
    }
}

#[test]
fn pipeline_through_c_api() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let cfg = CString::new(
        r#"{"data": {"source": "synth", "world": {"species_count": 5, "condition_count": 3}},
            "model": {"epochs": 5, "hidden_dim": 4}, "baselines": {"gbdt": {"rounds": 3}}}"#,
    )
    .unwrap();
    let stage = CString::new("all").unwrap();
    assert_eq!(
        unsafe { ms_run_pipeline(cfg.as_ptr(), stage.as_ptr(), out.as_ptr()) },
        MsStatus::Ok,
        "{}",
        if ms_last_error().is_null() { String::new() } else { last_error() }
    );
    assert!(dir.path().join("compare.json").exists());
}

#[test]
fn scalar_helpers() {
    assert!((ms_f1_score(0.8822, 0.7392) - 0.8044).abs() < 5e-4);
    assert_eq!(ms_f1_score(0.0, 0.5), 0.0);
    let mut out = -1;
    for (xy, yx, want) in [(1, 1, 0), (0, 0, 1), (1, 0, 2), (0, 1, 2)] {
        assert_eq!(unsafe { ms_derive_two_way(xy, yx, &mut out) }, MsStatus::Ok);
        assert_eq!(out, want);
    }
    assert_eq!(unsafe { ms_derive_two_way(2, 0, &mut out) }, MsStatus::InvalidArgument);
    let task = CString::new("two-way").unwrap();
    let mut c = 0usize;
    assert_eq!(unsafe { ms_task_class_count(task.as_ptr(), &mut c) }, MsStatus::Ok);
    assert_eq!(c, 3);
    let v = unsafe { CStr::from_ptr(ms_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/microsage.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ms_model_train", "ms_run_pipeline", "MS_STATUS_PANIC", "typedef struct MsModel MsModel"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
