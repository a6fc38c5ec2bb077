//! C ABI over `microsage`.
//!
//! Every fallible function returns an [`MsStatus`]; on failure the message is
//! available from [`ms_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function. Panics never cross the
//! boundary; they surface as `MS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::fs::File;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use microsage::config::RunConfig;
use microsage::data::{derive_two_way, ingest_csv, Dataset, SignLabel};
use microsage::error::Error;
use microsage::eval::f1_score;
use microsage::graph::Task;
use microsage::nn::{self, save_checkpoint, GraphSageModel};
use microsage::pipeline::{self, Prepared, Stage};
use microsage::synth::{synthesize, WorldConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Data = 5,
    Model = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Test-set metrics. Binary-only fields are NaN for the two-way task.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MsMetrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
    pub test_count: usize,
}

/// Opaque dataset handle.
pub struct MsDataset {
    inner: Dataset,
}

/// Opaque trained-model handle; keeps the prepared graph it was trained on.
pub struct MsModel {
    model: GraphSageModel,
    prepared: Prepared,
    seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MsStatus {
    match e {
        Error::Io { .. } | Error::MissingInput(_) => MsStatus::Io,
        Error::ConfigParse(_) | Error::Json(_) | Error::Csv(_) | Error::MalformedRow { .. } => MsStatus::Parse,
        Error::InvalidConfig(_) | Error::DegenerateSplit { .. } => MsStatus::InvalidArgument,
        Error::NonFiniteLoss { .. } | Error::MissingCache(_) | Error::EmptyModel | Error::ShapeMismatch { .. } => {
            MsStatus::Model
        }
        _ => MsStatus::Data,
    }
}

enum Failure {
    Status(MsStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MsStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MsStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(MsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure::Status(MsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    opt_str(p, what)?.ok_or_else(|| null(what))
}

fn open(path: &str) -> Result<File, Failure> {
    File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput(PathBuf::from(path)).into(),
        _ => Error::Io {
            path: path.into(),
            source: e,
        }
        .into(),
    })
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ms_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a synthetic dataset. `world_json` may be NULL for defaults.
///
/// # Safety
/// `world_json` must be NULL or a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_synthesize(world_json: *const c_char, out: *mut *mut MsDataset) -> MsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let world = match opt_str(world_json, "world_json")? {
            Some(text) => serde_json::from_str::<WorldConfig>(text).map_err(|e| Error::ConfigParse(e.to_string()))?,
            None => WorldConfig::default(),
        };
        let (_, inner) = synthesize(&world)?;
        *out = Box::into_raw(Box::new(MsDataset { inner }));
        Ok(())
    })
}

/// Reads a records CSV and a phylogenetic distance CSV.
///
/// # Safety
/// Paths must be valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_load_csv(
    records_path: *const c_char,
    phylo_path: *const c_char,
    epsilon: f64,
    out: *mut *mut MsDataset,
) -> MsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let records = open(req_str(records_path, "records_path")?)?;
        let phylo = open(req_str(phylo_path, "phylo_path")?)?;
        let inner = ingest_csv(records, phylo, epsilon)?;
        *out = Box::into_raw(Box::new(MsDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `dataset` must come from this library (or be NULL); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_record_count(dataset: *const MsDataset, out: *mut usize) -> MsStatus {
    guard(|| {
        let ds = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = ds.inner.records().len();
        Ok(())
    })
}

/// Writes counts of mutualism, competition and parasitism records.
///
/// # Safety
/// `out` must point to 3 writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_two_way_counts(dataset: *const MsDataset, out: *mut usize) -> MsStatus {
    guard(|| {
        let ds = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let counts = ds.inner.two_way_counts();
        ptr::copy_nonoverlapping(counts.as_ptr(), out, 3);
        Ok(())
    })
}

/// # Safety
/// `dataset` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ms_dataset_free(dataset: *mut MsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Trains GraphSAGE on `dataset`. `run_config_json` (may be NULL) is a run
/// configuration; its data source and output directory are ignored.
///
/// # Safety
/// Pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_model_train(
    dataset: *const MsDataset,
    run_config_json: *const c_char,
    out: *mut *mut MsModel,
) -> MsStatus {
    guard(|| {
        let ds = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = match opt_str(run_config_json, "run_config_json")? {
            Some(text) => RunConfig::from_json(text)?,
            None => RunConfig::default(),
        }
        .resolve(&Default::default())?;
        let prepared = pipeline::prepare(
            &ds.inner,
            config.task,
            config.seed,
            config.model.train_fraction,
            config.features.standardize,
        )?;
        let outcome = pipeline::train_graphsage(&prepared, &config.model)?;
        *out = Box::into_raw(Box::new(MsModel {
            model: outcome.model,
            prepared,
            seed: config.seed,
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_model_node_count(model: *const MsModel, out: *mut usize) -> MsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.prepared.graph.node_count();
        Ok(())
    })
}

/// Predicted class of every edge-graph node into `labels[0..capacity]`.
///
/// # Safety
/// `labels` must have room for `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn ms_model_predict(model: *const MsModel, labels: *mut usize, capacity: usize) -> MsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let predictions = nn::predict(&m.model, &m.prepared.graph)?;
        if capacity < predictions.len() {
            return Err(Failure::Status(
                MsStatus::BufferTooSmall,
                format!("need {} slots, got {capacity}", predictions.len()),
            ));
        }
        ptr::copy_nonoverlapping(predictions.as_ptr(), labels, predictions.len());
        Ok(())
    })
}

/// Test-split metrics of the trained model.
///
/// # Safety
/// `model` must come from this library; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_model_evaluate(model: *const MsModel, out: *mut MsMetrics) -> MsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let report = pipeline::evaluate_graphsage(&m.model, &m.prepared)?;
        let metrics = &report.metrics;
        let (sensitivity, precision, f1) = match &metrics.binary {
            Some(b) => (b.sensitivity, b.precision, b.f1),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        *out = MsMetrics {
            accuracy: metrics.accuracy,
            macro_f1: metrics.macro_f1,
            sensitivity,
            precision,
            f1,
            test_count: report.confusion.total() as usize,
        };
        Ok(())
    })
}

/// Writes a JSON checkpoint.
///
/// # Safety
/// `model` must come from this library; `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn ms_model_save(model: *const MsModel, path: *const c_char) -> MsStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let path = req_str(path, "path")?;
        let file = File::create(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        save_checkpoint(&m.model, m.seed, serde_json::Value::Null, std::io::BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ms_model_free(model: *mut MsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Runs a pipeline stage (`synth`, `featurize`, `build-graph`, `train`,
/// `evaluate`, `compare` or `all`). `config_json` may be NULL for defaults;
/// `out_dir`, when not NULL, overrides the configured output directory.
///
/// # Safety
/// Arguments must be NULL or valid C strings.
#[no_mangle]
pub unsafe extern "C" fn ms_run_pipeline(
    config_json: *const c_char,
    stage: *const c_char,
    out_dir: *const c_char,
) -> MsStatus {
    guard(|| {
        let stage = match req_str(stage, "stage")? {
            "synth" => Stage::Synth,
            "featurize" => Stage::Featurize,
            "build-graph" => Stage::BuildGraph,
            "train" => Stage::Train,
            "evaluate" => Stage::Evaluate,
            "compare" => Stage::Compare,
            "all" => Stage::All,
            other => {
                return Err(Failure::Status(
                    MsStatus::InvalidArgument,
                    format!("unknown stage `{other}`"),
                ))
            }
        };
        let base = match opt_str(config_json, "config_json")? {
            Some(text) => RunConfig::from_json(text)?,
            None => RunConfig::default(),
        };
        let overrides = microsage::config::Overrides {
            out_dir: opt_str(out_dir, "out_dir")?.map(PathBuf::from),
            ..Default::default()
        };
        pipeline::run_pipeline(&base.resolve(&overrides)?, stage)?;
        Ok(())
    })
}

/// Harmonic mean of precision and recall (0 when either is 0).
#[no_mangle]
pub extern "C" fn ms_f1_score(precision: f64, recall: f64) -> f64 {
    f1_score(precision, recall)
}

/// Two-way class from two one-way signs (0 = negative, 1 = positive).
/// Writes 0 = mutualism, 1 = competition, 2 = parasitism.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_derive_two_way(sign_xy: c_int, sign_yx: c_int, out: *mut c_int) -> MsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let sign = |v: c_int| match v {
            0 => Ok(SignLabel::Negative),
            1 => Ok(SignLabel::Positive),
            _ => Err(Failure::Status(MsStatus::InvalidArgument, format!("sign must be 0 or 1, got {v}"))),
        };
        *out = derive_two_way(sign(sign_xy)?, sign(sign_yx)?).class_index() as c_int;
        Ok(())
    })
}

/// Number of classes of a task name (`one-way` / `two-way`).
///
/// # Safety
/// `task` must be a valid C string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_task_class_count(task: *const c_char, out: *mut usize) -> MsStatus {
    guard(|| {
        let task: Task = req_str(task, "task")?.parse()?;
        *out.as_mut().ok_or_else(|| null("out"))? = task.n_classes();
        Ok(())
    })
}
