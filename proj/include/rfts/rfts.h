/*
 * rfts - random-forest two-sample tests, C API.
 *
 * All functions return an rfts_status; RFTS_OK means success. On failure a
 * human-readable message is available from rfts_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with rfts_string_free().
 *
 * Matrices are passed as row-major double buffers: `rows` observations of
 * `cols` features each.
 */
#ifndef RFTS_H
#define RFTS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define RFTS_API __attribute__((visibility("default")))

typedef enum rfts_status {
  RFTS_OK = 0,
  RFTS_ERR_INVALID = 1, /* bad arguments, malformed spec or input */
  RFTS_ERR_IO = 2,      /* file read/write failure */
  RFTS_ERR_COMPUTE = 3, /* computation failed (degenerate data, ...) */
  RFTS_ERR_PARTIAL = 4  /* study finished but some grid point had >10% failed runs */
} rfts_status;

/* Library version string, e.g. "0.1.0". Static storage; do not free. */
RFTS_API const char* rfts_version(void);

/* Message for the most recent failure on this thread; static storage. */
RFTS_API const char* rfts_last_error(void);

RFTS_API void rfts_string_free(char* s);

/*
 * Options for rfts_run_test. Defaults: alpha 0.05, k 100, b 200,
 * n_train 0 (half split), m_partitions 2, trees 600, min_node_size 4,
 * mtry 0 (floor(sqrt(p))), max_depth 0 (unlimited), bootstrap_fraction 1.0,
 * seed 1, jobs 0 (all cores / RFTS_JOBS).
 */
typedef struct rfts_options rfts_options;

RFTS_API rfts_options* rfts_options_new(void);
RFTS_API void rfts_options_free(rfts_options* opts);

/* Numeric keys: "alpha", "b", "bootstrap_fraction", "jobs", "k",
 * "m_partitions", "max_depth", "min_node_size", "mtry", "n_train",
 * "trees". Unknown keys are rejected. */
RFTS_API rfts_status rfts_options_set_f64(rfts_options* opts, const char* key,
                                          double value);
RFTS_API rfts_status rfts_options_set_u64(rfts_options* opts, const char* key,
                                          uint64_t value);

/*
 * Run one two-sample test. `method` is one of "binomial", "hoeffding",
 * "hyporf", "ustat", "mmdboot". On success *report_json_out holds the
 * TestReport as a JSON object (schema documented in the README).
 * `opts` may be NULL for all defaults.
 */
RFTS_API rfts_status rfts_run_test(const char* method, const double* x, size_t x_rows,
                                   const double* y, size_t y_rows, size_t cols,
                                   const rfts_options* opts, char** report_json_out);

/*
 * Build the study spec JSON for a named preset at scale "desk" or "full".
 * Preset names are returned by rfts_preset_names (one per line).
 */
RFTS_API rfts_status rfts_preset_study(const char* preset, const char* scale,
                                       uint64_t base_seed, char** spec_json_out);
RFTS_API rfts_status rfts_preset_names(char** names_out);

/*
 * Run a Monte-Carlo study described by `spec_json` (a StudySpec object;
 * schema documented in the README). Writes the result CSV to
 * `output_csv_path` plus a JSON metadata sidecar at the same path with
 * ".meta.json" appended. Existing complete grid points written by the same
 * spec are reused (resume). `progress` (nullable) receives one line per
 * grid point. On success *summary_json_out (nullable) holds the result
 * rows. Returns RFTS_ERR_PARTIAL if any grid point had more than 10%
 * failed runs; the CSV is still written in that case.
 */
typedef void (*rfts_progress_fn)(const char* line, void* user);

RFTS_API rfts_status rfts_run_study(const char* spec_json, const char* output_csv_path,
                                    rfts_progress_fn progress, void* user,
                                    char** summary_json_out);

/* Load a persisted study result (CSV + sidecar) back into JSON. */
RFTS_API rfts_status rfts_load_study(const char* csv_path, char** result_json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RFTS_H */
