#ifndef RELBIAS_RELBIAS_H
#define RELBIAS_RELBIAS_H

/*
 * C interface to the relbias experiment library.
 *
 * Every object is an opaque handle created by an rb_*_create / rb_*_build /
 * rb_*_run / rb_*_generate call and released with the matching rb_*_free.
 * Functions that can fail return an rb_status; on failure a message is
 * available from rb_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * rb_string_free. Strings returned as const char* stay valid for the
 * lifetime of the library (catalog) or of the owning handle (reports).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RELBIAS_BUILDING)
#    define RB_API __declspec(dllexport)
#  else
#    define RB_API __declspec(dllimport)
#  endif
#else
#  define RB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rb_status {
    RB_OK = 0,
    RB_ERR_CONFIG = 1,   /* inconsistent model, dataset or experiment description */
    RB_ERR_USAGE = 2,    /* unknown id, format or name; bad argument */
    RB_ERR_IO = 3,
    RB_ERR_DIVERGED = 4, /* training produced a non-finite loss */
    RB_ERR_INTERNAL = 5
} rb_status;

RB_API const char* rb_last_error(void);
RB_API const char* rb_version(void);
RB_API void rb_string_free(char* text);

/* ---- run options ------------------------------------------------------- */

typedef struct rb_run_options rb_run_options;

RB_API rb_status rb_run_options_create(rb_run_options** out);
RB_API void rb_run_options_free(rb_run_options* options);
/* Keys: seed, sims, threads, epochs, learning_rate, batch_size. */
RB_API rb_status rb_run_options_set(rb_run_options* options, const char* key, const char* value);
/* Plain-text key=value file, '#' comments. */
RB_API rb_status rb_run_options_load_config(rb_run_options* options, const char* path);

/* ---- experiment catalog and reports ------------------------------------ */

RB_API size_t rb_catalog_size(void);
/* NULL when index is out of range. */
RB_API const char* rb_catalog_id(size_t index);
RB_API const char* rb_catalog_description(size_t index);

typedef struct rb_report rb_report;

typedef struct rb_row_info {
    const char* sweep_value;
    const char* fusion;       /* "plain", "early" or "mid" */
    double mean_accuracy;     /* fraction in [0, 1] */
    double sd_pp;             /* sample SD in percentage points */
    size_t simulations;
    int failed;               /* nonzero when the cell's training failed */
    const char* error;        /* empty unless failed */
} rb_row_info;

/* options may be NULL for catalog defaults. */
RB_API rb_status rb_experiment_run(const char* id, const rb_run_options* options, rb_report** out);
RB_API void rb_report_free(rb_report* report);
RB_API const char* rb_report_id(const rb_report* report);
RB_API size_t rb_report_row_count(const rb_report* report);
RB_API rb_status rb_report_row(const rb_report* report, size_t index, rb_row_info* out);
/* Copies up to `capacity` per-simulation accuracies of one row; either
 * buffer may be NULL. *count receives the number of simulations. */
RB_API rb_status rb_report_row_accuracies(const rb_report* report, size_t index, double* test_accuracies,
                                          double* train_accuracies, size_t capacity, size_t* count);
/* format: "csv", "markdown", "plotdata", "summary" or "significance". */
RB_API rb_status rb_report_emit(const rb_report* report, const char* format, char** out_text);

/* ---- datasets ----------------------------------------------------------- */

typedef struct rb_dataset rb_dataset;

/* task: equality, comparison, digitsum3, reversal or parity. For equality a
 * size of 0 selects the standard protocol (exhaustive below n=10, 10000
 * pairs otherwise); other tasks need an even size > 0. */
RB_API rb_status rb_dataset_generate(const char* task, int n, size_t size, uint64_t seed, rb_dataset** out);
RB_API void rb_dataset_free(rb_dataset* dataset);
RB_API size_t rb_dataset_size(const rb_dataset* dataset);
RB_API int rb_dataset_dim(const rb_dataset* dataset);
RB_API size_t rb_dataset_positives(const rb_dataset* dataset);
/* CSV with header v1,v2,label. */
RB_API rb_status rb_dataset_write_csv(const rb_dataset* dataset, const char* path);
RB_API rb_status rb_dataset_emit_csv(const rb_dataset* dataset, char** out_text);

/* ---- statistics --------------------------------------------------------- */

typedef struct rb_wilcoxon_result {
    double w_statistic;   /* min(W+, W-) */
    double p_value;       /* two-sided */
    size_t n_effective;   /* nonzero differences */
    int exact;            /* 1 exact null distribution, 0 normal approximation */
    int significant;      /* p < alpha */
} rb_wilcoxon_result;

RB_API rb_status rb_wilcoxon(const double* a, const double* b, size_t length, double alpha, rb_wilcoxon_result* out);
/* Pools the acc_* columns of two results CSV files (rows in file order) and
 * runs the paired test. fusion may be NULL to keep every row. */
RB_API rb_status rb_stats_compare_csv(const char* csv_a, const char* csv_b, const char* fusion, double alpha,
                                      rb_wilcoxon_result* out);

/* ---- models ------------------------------------------------------------- */

typedef struct rb_model rb_model;

typedef struct rb_model_spec {
    int vector_dim;
    const int* hidden_sizes; /* NULL with hidden_count 0 means {10} */
    size_t hidden_count;
    const char* activation;     /* relu, sigmoid, tanh; NULL means relu */
    const char* fusion;         /* plain, early, mid; NULL means plain */
    const char* representation; /* zero_one, sign; NULL means zero_one */
} rb_model_spec;

RB_API rb_status rb_model_build(const rb_model_spec* spec, uint64_t seed, rb_model** out);
RB_API void rb_model_free(rb_model* model);
RB_API size_t rb_model_parameter_count(const rb_model* model);
/* v1_bits and v2_bits are strings like "0110" of length vector_dim. */
RB_API rb_status rb_model_forward_pair(const rb_model* model, const char* v1_bits, const char* v2_bits,
                                       double* probability);
/* Trains a fresh model of `spec` on the dataset with the given options
 * (epochs, learning_rate, batch_size, seed; NULL for defaults) and returns
 * it in *out. */
RB_API rb_status rb_model_train(const rb_model_spec* spec, const rb_dataset* train_data,
                                const rb_run_options* options, rb_model** out, double* train_accuracy);
RB_API rb_status rb_model_evaluate(const rb_model* model, const rb_dataset* data, double* accuracy);

RB_API rb_status rb_dr_compute(const double* v1, const double* v2, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* RELBIAS_RELBIAS_H */
