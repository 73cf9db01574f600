#ifndef TSDAPT_TSDAPT_H
#define TSDAPT_TSDAPT_H

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32 || defined __CYGWIN__
#  ifdef TSDAPT_BUILDING
#    define TSDAPT_API __declspec(dllexport)
#  else
#    define TSDAPT_API __declspec(dllimport)
#  endif
#else
#  define TSDAPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsdapt_status {
  TSDAPT_OK = 0,
  TSDAPT_INVALID_ARGUMENT = 1,
  TSDAPT_DEGENERATE_COVARIANCE = 2,
  TSDAPT_NUMERICAL_FAILURE = 3,
  TSDAPT_INVALID_WEIGHTS = 4,
  TSDAPT_MISSING_TARGET_CLASS = 5,
  TSDAPT_EMPTY_CLASS = 6,
  TSDAPT_INVALID_LENGTH = 7,
  TSDAPT_PARSE_ERROR = 8,
  TSDAPT_CONFIG_ERROR = 9,
  TSDAPT_INPUT_ERROR = 10,
  TSDAPT_OUTPUT_ERROR = 11,
  TSDAPT_OUT_OF_MEMORY = 12,
  TSDAPT_INTERNAL_ERROR = 13
} tsdapt_status;

typedef enum tsdapt_bound {
  TSDAPT_BOUND_SELECTED = 0,
  TSDAPT_BOUND_ORACLE_UPPER = 1,
  TSDAPT_BOUND_NONE_LOWER = 2
} tsdapt_bound;

typedef struct tsdapt_config tsdapt_config;
typedef struct tsdapt_embeddings tsdapt_embeddings;
typedef struct tsdapt_transforms tsdapt_transforms;
typedef struct tsdapt_report tsdapt_report;
typedef struct tsdapt_run tsdapt_run;

TSDAPT_API const char* tsdapt_version(void);
TSDAPT_API const char* tsdapt_status_name(tsdapt_status status);

/* Message of the last failed call on this thread; "" after a success. */
TSDAPT_API const char* tsdapt_last_error(void);

/* Process exit code for a status: 0 ok, 2 bad input or config,
   3 numerical failure, 4 output failure, 1 anything else. */
TSDAPT_API int tsdapt_exit_code(tsdapt_status status);

/* Configuration */
TSDAPT_API tsdapt_status tsdapt_config_new(tsdapt_config** out);
TSDAPT_API tsdapt_status tsdapt_config_load(const char* path, tsdapt_config** out);
TSDAPT_API tsdapt_status tsdapt_config_set(tsdapt_config* config, const char* key, const char* value);
TSDAPT_API tsdapt_status tsdapt_config_validate(const tsdapt_config* config);
TSDAPT_API void tsdapt_config_free(tsdapt_config* config);

/* Experiment runs */
TSDAPT_API tsdapt_status tsdapt_run_sweep(const tsdapt_config* config, const char* out_dir, size_t* rows_written);
TSDAPT_API tsdapt_status tsdapt_run_adapt(const tsdapt_config* config, const char* target_train,
                                          const char* source_adapt, const char* source_val, const char* out_dir,
                                          tsdapt_run** out);
TSDAPT_API tsdapt_status tsdapt_export_synthetic(const tsdapt_config* config, double b, uint64_t seed,
                                                 const char* out_dir);

/* Results of tsdapt_run_adapt: one report per configured bound. */
TSDAPT_API size_t tsdapt_run_report_count(const tsdapt_run* run);
TSDAPT_API const tsdapt_report* tsdapt_run_report(const tsdapt_run* run, size_t index);
TSDAPT_API double tsdapt_run_fit_seconds(const tsdapt_run* run);
TSDAPT_API double tsdapt_run_select_seconds(const tsdapt_run* run);
TSDAPT_API double tsdapt_run_classify_seconds(const tsdapt_run* run);
TSDAPT_API void tsdapt_run_free(tsdapt_run* run);

/* Embedding sets. data is row-major rows x cols. */
TSDAPT_API tsdapt_status tsdapt_embeddings_create(size_t rows, size_t cols, size_t class_count, const double* data,
                                                  const int* labels, tsdapt_embeddings** out);
TSDAPT_API tsdapt_status tsdapt_embeddings_read(const char* path, tsdapt_embeddings** out);
TSDAPT_API tsdapt_status tsdapt_embeddings_write(const tsdapt_embeddings* embeddings, const char* path);
TSDAPT_API size_t tsdapt_embeddings_rows(const tsdapt_embeddings* embeddings);
TSDAPT_API size_t tsdapt_embeddings_cols(const tsdapt_embeddings* embeddings);
TSDAPT_API size_t tsdapt_embeddings_class_count(const tsdapt_embeddings* embeddings);
TSDAPT_API const double* tsdapt_embeddings_data(const tsdapt_embeddings* embeddings);
TSDAPT_API const int* tsdapt_embeddings_labels(const tsdapt_embeddings* embeddings);
TSDAPT_API void tsdapt_embeddings_free(tsdapt_embeddings* embeddings);

/* Per-class transforms fitted from source_adapt to target_train. */
TSDAPT_API tsdapt_status tsdapt_fit_transforms(const tsdapt_config* config, const tsdapt_embeddings* target_train,
                                               const tsdapt_embeddings* source_adapt, tsdapt_transforms** out);
TSDAPT_API size_t tsdapt_transforms_unconverged(const tsdapt_transforms* transforms);
/* Maps x (length dim) with the transform of class label into out (length dim). */
TSDAPT_API tsdapt_status tsdapt_transforms_apply(const tsdapt_transforms* transforms, int label, const double* x,
                                                 size_t dim, double* out);
TSDAPT_API void tsdapt_transforms_free(tsdapt_transforms* transforms);

/* Evaluates source_val under one bound; the classifier is seeded with the
   config's first seed. */
TSDAPT_API tsdapt_status tsdapt_evaluate(const tsdapt_config* config, const tsdapt_transforms* transforms,
                                         const tsdapt_embeddings* target_train, const tsdapt_embeddings* source_val,
                                         tsdapt_bound bound, tsdapt_report** out);
TSDAPT_API tsdapt_bound tsdapt_report_bound(const tsdapt_report* report);
TSDAPT_API double tsdapt_report_accuracy(const tsdapt_report* report);
TSDAPT_API size_t tsdapt_report_class_count(const tsdapt_report* report);
TSDAPT_API double tsdapt_report_class_accuracy(const tsdapt_report* report, size_t label);
/* Count of samples of class truth predicted as predicted. */
TSDAPT_API size_t tsdapt_report_confusion(const tsdapt_report* report, size_t truth, size_t predicted);
TSDAPT_API void tsdapt_report_free(tsdapt_report* report);

#ifdef __cplusplus
}
#endif

#endif
