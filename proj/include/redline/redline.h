#ifndef REDLINE_REDLINE_H
#define REDLINE_REDLINE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define REDLINE_API __attribute__((visibility("default")))
#else
#define REDLINE_API
#endif

typedef enum redline_status {
  REDLINE_OK = 0,
  REDLINE_INVALID_ARGUMENT = 1,
  REDLINE_UNKNOWN_PR = 2,
  REDLINE_PROVIDER_ERROR = 3,
  REDLINE_EMPTY_COHORT = 4,
  REDLINE_NO_SCORED = 5,
  REDLINE_IO_ERROR = 6,
  REDLINE_MANIFEST_ERROR = 7,
  REDLINE_GIT_ERROR = 8,
  REDLINE_SYNTAX_ERROR = 9,
  REDLINE_CLASSIFIER_ERROR = 10,
  REDLINE_INTERNAL_ERROR = 99
} redline_status;

/* Message of the last failed call on this thread; empty after a success. */
REDLINE_API const char* redline_last_error(void);
REDLINE_API const char* redline_status_name(redline_status status);
REDLINE_API const char* redline_version(void);

/* Run configuration. */

typedef struct redline_config redline_config;

REDLINE_API redline_status redline_config_new(redline_config** out);
REDLINE_API void redline_config_free(redline_config* config);

REDLINE_API redline_status redline_config_set_manifest(redline_config* config, const char* path);
REDLINE_API redline_status redline_config_set_output_dir(redline_config* config, const char* path);
/* "baseline" or "remote"; remote needs a provider url. */
REDLINE_API redline_status redline_config_set_provider(redline_config* config, const char* kind);
REDLINE_API redline_status redline_config_set_provider_url(redline_config* config, const char* url);
REDLINE_API redline_status redline_config_set_classifier_url(redline_config* config, const char* url);
REDLINE_API redline_status redline_config_set_classifier_fixture(redline_config* config, const char* path);
REDLINE_API redline_status redline_config_set_cache_dir(redline_config* config, const char* path);
/* Comma-separated, e.g. ".py,.pyi". */
REDLINE_API redline_status redline_config_set_extensions(redline_config* config, const char* extensions);
REDLINE_API redline_status redline_config_set_refactor_similarity(redline_config* config, double threshold);
REDLINE_API redline_status redline_config_set_min_fn_lines(redline_config* config, long lines);
REDLINE_API redline_status redline_config_set_parallelism(redline_config* config, unsigned workers);
REDLINE_API redline_status redline_config_set_include_nested(redline_config* config, int enabled);
REDLINE_API redline_status redline_config_set_exclude_test_files(redline_config* config, int enabled);
REDLINE_API redline_status redline_config_set_strip_docstrings(redline_config* config, int enabled);
REDLINE_API redline_status redline_config_set_retry(redline_config* config, unsigned retries, unsigned backoff_ms,
                                                    unsigned timeout_s);

/* Commands. On success *out receives a result to free with redline_result_free. */

typedef struct redline_result redline_result;

REDLINE_API redline_status redline_analyze_pr(const redline_config* config, const char* pr_id, redline_result** out);
REDLINE_API redline_status redline_compare_cohorts(const redline_config* config, redline_result** out);
/* metric: "mrs", "cc_delta" or "emotion:<name>". */
REDLINE_API redline_status redline_emit_distribution(const redline_config* config, const char* metric,
                                                     redline_result** out);

REDLINE_API const char* redline_result_summary(const redline_result* result);
REDLINE_API size_t redline_result_warning_count(const redline_result* result);
REDLINE_API const char* redline_result_warning(const redline_result* result, size_t index);
REDLINE_API size_t redline_result_output_count(const redline_result* result);
REDLINE_API const char* redline_result_output(const redline_result* result, size_t index);
REDLINE_API void redline_result_free(redline_result* result);

/* Building blocks. */

typedef struct redline_line_counts {
  long loc;
  long multiline_string_lines;
  long blank_lines;
  long comment_lines;
} redline_line_counts;

REDLINE_API redline_status redline_line_counts_of(const char* source, size_t length, redline_line_counts* out);
/* Sum of the cyclomatic complexity of every function in a module. */
REDLINE_API redline_status redline_file_complexity(const char* source, size_t length, long* out);

typedef struct redline_function_list redline_function_list;

REDLINE_API redline_status redline_extract_functions(const char* source, size_t length, const char* file_path,
                                                     int include_nested, redline_function_list** out);
REDLINE_API size_t redline_function_count(const redline_function_list* list);
REDLINE_API const char* redline_function_qualified_name(const redline_function_list* list, size_t index);
REDLINE_API int redline_function_start_line(const redline_function_list* list, size_t index);
REDLINE_API int redline_function_end_line(const redline_function_list* list, size_t index);
REDLINE_API int redline_function_complexity(const redline_function_list* list, size_t index);
REDLINE_API const char* redline_function_normalized_body(const redline_function_list* list, size_t index);
REDLINE_API void redline_function_list_free(redline_function_list* list);

/* Baseline hashed embedding; out must hold dim floats. */
REDLINE_API redline_status redline_baseline_embed(const char* text, size_t dim, float* out);
REDLINE_API redline_status redline_cosine(const float* a, const float* b, size_t dim, double* out);

typedef struct redline_mann_whitney {
  double u_statistic; /* U of the first sample */
  double p_value;     /* two-sided */
  int exact;
  /* "", "*" or "***" */
  const char* stars;
} redline_mann_whitney;

REDLINE_API redline_status redline_mann_whitney_u(const double* x, size_t n1, const double* y, size_t n2,
                                                  redline_mann_whitney* out);

#ifdef __cplusplus
}
#endif

#endif
