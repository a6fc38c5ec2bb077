#ifndef MICROSAGE_H
#define MICROSAGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_ARGUMENT = 2,
  MS_STATUS_IO = 3,
  MS_STATUS_PARSE = 4,
  MS_STATUS_DATA = 5,
  MS_STATUS_MODEL = 6,
  MS_STATUS_BUFFER_TOO_SMALL = 7,
  MS_STATUS_PANIC = 8,
} MsStatus;

// Opaque dataset handle.
typedef struct MsDataset MsDataset;

// Opaque trained-model handle; keeps the prepared graph it was trained on.
typedef struct MsModel MsModel;

// Test-set metrics. Binary-only fields are NaN for the two-way task.
typedef struct MsMetrics {
  double accuracy;
  double macro_f1;
  double sensitivity;
  double precision;
  double f1;
  size_t test_count;
} MsMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next call into this library on the same thread.
const char *ms_last_error(void);

// Library version as a static NUL-terminated string.
const char *ms_version(void);

// Generates a synthetic dataset. `world_json` may be NULL for defaults.
//
// # Safety
// `world_json` must be NULL or a valid C string; `out` must be writable.
enum MsStatus ms_dataset_synthesize(const char *world_json, struct MsDataset **out);

// Reads a records CSV and a phylogenetic distance CSV.
//
// # Safety
// Paths must be valid C strings; `out` must be writable.
enum MsStatus ms_dataset_load_csv(const char *records_path,
                                  const char *phylo_path,
                                  double epsilon,
                                  struct MsDataset **out);

// # Safety
// `dataset` must come from this library (or be NULL); `out` writable.
enum MsStatus ms_dataset_record_count(const struct MsDataset *dataset, size_t *out);

// Writes counts of mutualism, competition and parasitism records.
//
// # Safety
// `out` must point to 3 writable `size_t`.
enum MsStatus ms_dataset_two_way_counts(const struct MsDataset *dataset, size_t *out);

// # Safety
// `dataset` must come from this library and not be used afterwards.
void ms_dataset_free(struct MsDataset *dataset);

// Trains GraphSAGE on `dataset`. `run_config_json` (may be NULL) is a run
// configuration; its data source and output directory are ignored.
//
// # Safety
// Pointers must be valid; `out` writable.
enum MsStatus ms_model_train(const struct MsDataset *dataset,
                             const char *run_config_json,
                             struct MsModel **out);

// # Safety
// `model` must come from this library; `out` writable.
enum MsStatus ms_model_node_count(const struct MsModel *model, size_t *out);

// Predicted class of every edge-graph node into `labels[0..capacity]`.
//
// # Safety
// `labels` must have room for `capacity` entries.
enum MsStatus ms_model_predict(const struct MsModel *model, size_t *labels, size_t capacity);

// Test-split metrics of the trained model.
//
// # Safety
// `model` must come from this library; `out` writable.
enum MsStatus ms_model_evaluate(const struct MsModel *model, struct MsMetrics *out);

// Writes a JSON checkpoint.
//
// # Safety
// `model` must come from this library; `path` a valid C string.
enum MsStatus ms_model_save(const struct MsModel *model, const char *path);

// # Safety
// `model` must come from this library and not be used afterwards.
void ms_model_free(struct MsModel *model);

// Runs a pipeline stage (`synth`, `featurize`, `build-graph`, `train`,
// `evaluate`, `compare` or `all`). `config_json` may be NULL for defaults;
// `out_dir`, when not NULL, overrides the configured output directory.
//
// # Safety
// Arguments must be NULL or valid C strings.
enum MsStatus ms_run_pipeline(const char *config_json, const char *stage, const char *out_dir);

// Harmonic mean of precision and recall (0 when either is 0).
double ms_f1_score(double precision, double recall);

// Two-way class from two one-way signs (0 = negative, 1 = positive).
// Writes 0 = mutualism, 1 = competition, 2 = parasitism.
//
// # Safety
// `out` must be writable.
enum MsStatus ms_derive_two_way(int sign_xy, int sign_yx, int *out);

// Number of classes of a task name (`one-way` / `two-way`).
//
// # Safety
// `task` must be a valid C string; `out` writable.
enum MsStatus ms_task_class_count(const char *task, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MICROSAGE_H */
