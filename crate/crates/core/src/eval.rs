//! Confusion matrices, accuracy / precision / recall / F1 and the report
//! writers.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Task;

/// `counts[t][p]` = instances of true class `t` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if let Some(bad) = counts.iter().find(|r| r.len() != c) {
            return Err(Error::shape(format!("{c}x{c}"), format!("row of length {}", bad.len())));
        }
        Ok(Self { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// (tp, fp, fn, tn) treating `class` as positive.
    pub fn one_vs_rest(&self, class: usize) -> (u64, u64, u64, u64) {
        let tp = self.counts[class][class];
        let fp: u64 = (0..self.n_classes()).map(|t| self.counts[t][class]).sum::<u64>() - tp;
        let fn_: u64 = self.counts[class].iter().sum::<u64>() - tp;
        (tp, fp, fn_, self.total() - tp - fp - fn_)
    }
}

pub fn confusion_matrix(predictions: &[usize], truths: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            actual: predictions.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&p, &t) in predictions.iter().zip(truths) {
        for label in [p, t] {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { label, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall; 0 when either is 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Binary-mode summary for the designated positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySummary {
    pub positive_class: usize,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub binary: Option<BinarySummary>,
}

/// One-vs-rest metrics per class with unweighted macro averages; with
/// `positive_class` set, also the binary summary for that class. 0/0 is 0.
pub fn metrics_from_confusion(cm: &ConfusionMatrix, positive_class: Option<usize>) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let c = cm.n_classes();
    if let Some(p) = positive_class.filter(|&p| p >= c) {
        return Err(Error::LabelOutOfRange { label: p, n_classes: c });
    }
    let per_class: Vec<ClassMetrics> = (0..c)
        .map(|k| {
            let (tp, fp, fn_, _) = cm.one_vs_rest(k);
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fn_);
            ClassMetrics {
                class: k,
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: tp + fn_,
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / c as f64;
    let binary = positive_class.map(|k| {
        let (tp, fp, fn_, tn) = cm.one_vs_rest(k);
        let m = &per_class[k];
        BinarySummary {
            positive_class: k,
            tp,
            fp,
            fn_,
            tn,
            sensitivity: m.recall,
            precision: m.precision,
            f1: m.f1,
        }
    });
    Ok(MetricsReport {
        accuracy: ratio(cm.trace(), total),
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
        binary,
    })
}

/// One evaluated model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub name: String,
    pub task: Task,
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
}

impl ModelReport {
    pub fn new(name: impl Into<String>, task: Task, predictions: &[usize], truths: &[usize]) -> Result<Self> {
        let confusion = confusion_matrix(predictions, truths, task.n_classes())?;
        let metrics = metrics_from_confusion(&confusion, task.positive_class())?;
        Ok(Self {
            name: name.into(),
            task,
            metrics,
            confusion,
        })
    }

    fn to_json(&self) -> Value {
        let names = self.task.class_names();
        let per_class: Vec<Value> = self
            .metrics
            .per_class
            .iter()
            .map(|m| {
                json!({
                    "class": names[m.class],
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                })
            })
            .collect();
        let mut doc = json!({
            "name": self.name,
            "task": self.task.name(),
            "confusion": self.confusion.counts,
            "per_class": per_class,
            "accuracy": self.metrics.accuracy,
            "macro_f1": self.metrics.macro_f1,
        });
        if let Some(b) = &self.metrics.binary {
            doc["positive"] = json!({
                "class": names[b.positive_class],
                "sensitivity": b.sensitivity,
                "precision": b.precision,
                "f1": b.f1,
                "tp": b.tp,
                "fp": b.fp,
                "fn": b.fn_,
                "tn": b.tn,
            });
        }
        doc
    }
}

/// Run-level header shared by every report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub run_id: String,
    pub seed: u64,
    pub config_echo: Value,
}

pub const REPORT_CSV_HEADER: &str = "model,task,scope,accuracy,sensitivity,precision,f1,support";

/// Writes the JSON report and the flat CSV metric table.
///
/// CSV rows: one per class, then an `overall` row carrying accuracy and
/// either the positive-class (binary) or macro (multiclass) metrics.
pub fn emit_report<J: Write, C: Write>(
    reports: &[ModelReport],
    meta: &RunMeta,
    json_out: J,
    csv_out: C,
) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::InvalidConfig("no model reports to emit".into()));
    }
    let doc = json!({
        "run_id": meta.run_id,
        "seed": meta.seed,
        "config_echo": meta.config_echo,
        "models": reports.iter().map(ModelReport::to_json).collect::<Vec<_>>(),
    });
    write_canonical_json(&doc, json_out)?;

    let mut csv_out = csv_out;
    let io = |e| Error::io("<report csv>", e);
    writeln!(csv_out, "# {}", comment_line(meta)).map_err(io)?;
    writeln!(csv_out, "{REPORT_CSV_HEADER}").map_err(io)?;
    for r in reports {
        let names = r.task.class_names();
        for m in &r.metrics.per_class {
            writeln!(
                csv_out,
                "{},{},{},,{:.6},{:.6},{:.6},{}",
                r.name,
                r.task.name(),
                names[m.class],
                m.recall,
                m.precision,
                m.f1,
                m.support
            )
            .map_err(io)?;
        }
        let (sens, prec, f1) = match &r.metrics.binary {
            Some(b) => (b.sensitivity, b.precision, b.f1),
            None => (r.metrics.macro_recall, r.metrics.macro_precision, r.metrics.macro_f1),
        };
        writeln!(
            csv_out,
            "{},{},overall,{:.6},{:.6},{:.6},{:.6},{}",
            r.name,
            r.task.name(),
            r.metrics.accuracy,
            sens,
            prec,
            f1,
            r.confusion.total()
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Single-line `run_id/seed/config` summary used as the comment header of
/// CSV artifacts.
pub fn comment_line(meta: &RunMeta) -> String {
    format!(
        "run_id={} seed={} config={}",
        meta.run_id,
        meta.seed,
        serde_json::to_string(&meta.config_echo).unwrap_or_default()
    )
}

/// Pretty JSON with sorted keys and every float at 6 decimals.
pub fn write_canonical_json<W: Write>(value: &Value, out: W) -> Result<()> {
    let mut s = String::new();
    render(value, 0, &mut s)?;
    s.push('\n');
    let mut out = out;
    out.write_all(s.as_bytes()).map_err(|e| Error::io("<json>", e))
}

fn render(value: &Value, indent: usize, s: &mut String) -> Result<()> {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Null | Value::Bool(_) | Value::String(_) => s.push_str(&value.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if !f.is_finite() {
                    return Err(Error::NonFinite("report value"));
                }
                let text = format!("{f:.6}");
                s.push_str(if text == "-0.000000" { "0.000000" } else { &text });
            } else {
                s.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                s.push_str("[]");
                return Ok(());
            }
            let scalar = items.iter().all(|v| !v.is_array() && !v.is_object());
            if scalar {
                s.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    render(v, indent, s)?;
                }
                s.push(']');
                return Ok(());
            }
            s.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                s.push_str(&pad(indent + 1));
                render(v, indent + 1, s)?;
                s.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            s.push_str(&pad(indent));
            s.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                s.push_str("{}");
                return Ok(());
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            s.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                s.push_str(&pad(indent + 1));
                s.push_str(&Value::String((*k).clone()).to_string());
                s.push_str(": ");
                render(&map[*k], indent + 1, s)?;
                s.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            s.push_str(&pad(indent));
            s.push('}');
        }
    }
    Ok(())
}
