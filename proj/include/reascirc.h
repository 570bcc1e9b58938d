/* C API for the reasoning-circuits question generation library.
 *
 * All functions return REASCIRC_OK (0) on success or an error code;
 * reascirc_last_error() holds a thread-local message for the most recent
 * failure on the calling thread. Strings returned through char** parameters
 * are heap-allocated and must be released with reascirc_string_free().
 */
#ifndef REASCIRC_H
#define REASCIRC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  REASCIRC_OK = 0,
  REASCIRC_E_IO = 1,
  REASCIRC_E_PARSE = 2,
  REASCIRC_E_SCHEMA = 3,
  REASCIRC_E_VALIDATION = 4,
  REASCIRC_E_CONFIG = 5,
  REASCIRC_E_CONTRACT = 6,
  REASCIRC_E_CAPACITY = 7,
  REASCIRC_E_BACKEND = 8,
  REASCIRC_E_RUN = 9,
  REASCIRC_E_INVALID_ARG = 10,
  REASCIRC_E_INTERNAL = 11
};

typedef struct reascirc_pool reascirc_pool;
typedef struct reascirc_backend reascirc_backend;

const char* reascirc_version(void);
const char* reascirc_last_error(void);
void reascirc_string_free(char* s);

/* --- Annotation pools ---------------------------------------------------- */

/* Loads and validates a JSONL annotation file. Fails with
 * REASCIRC_E_VALIDATION if any record breaks a structural rule. */
int reascirc_pool_load(const char* path, reascirc_pool** out);
void reascirc_pool_free(reascirc_pool* pool);
size_t reascirc_pool_size(const reascirc_pool* pool);

/* Validates without loading. report_json (optional) receives
 * {"records", "errors", "warnings", "items":[{record_id, rule, message,
 * severity}]}. Returns REASCIRC_E_VALIDATION when any record has errors. */
int reascirc_validate_file(const char* path, char** report_json);

/* --- Mixtures ------------------------------------------------------------ */

/* Samples a k-shot mixture (75% bridge / 25% comparison), expands it into
 * per-task records and writes <out_path> plus <out_path>.meta.json.
 * context_mode: "full" | "supporting". stats_json (optional) receives the
 * per-task histogram. */
int reascirc_mixture_build(const reascirc_pool* pool, int shots, uint64_t seed,
                           const char* context_mode, int include_baseline,
                           const char* out_path, char** stats_json);

/* --- Backends ------------------------------------------------------------ */

/* miss_policy: "fail" | "echo-empty" | "constant" (constant_text required
 * for "constant", ignored otherwise; may be NULL). */
int reascirc_backend_scripted(const reascirc_pool* pool,
                              const char* context_mode, const char* miss_policy,
                              const char* constant_text,
                              reascirc_backend** out);
int reascirc_backend_http(const char* endpoint, int timeout_ms, int retries,
                          reascirc_backend** out);
void reascirc_backend_free(reascirc_backend* backend);

/* --- Circuit runs ---------------------------------------------------------*/

/* Runs the circuit over every example of a dataset file. run_options_json
 * (optional) keys: "context_mode", "confused_policy" ("both" | "bridge_only" |
 * "comparison_only"), "validator_mode" ("warn" | "reject"),
 * "max_new_tokens", "jobs". traces_dir / predictions_path may be NULL.
 * summary_json (optional) receives {"total","succeeded","failed","failures"}.
 * Returns REASCIRC_E_RUN when any example failed; outputs for the rest are
 * still written. */
int reascirc_run_dataset(const char* dataset_path, reascirc_backend* backend,
                         const char* run_options_json, const char* traces_dir,
                         const char* predictions_path, char** summary_json);

/* --- Evaluation ------------------------------------------------------------*/

/* BLEU-1..4, METEOR-lite, ROUGE-L and their mean over a predictions file
 * (JSONL {id, reference, hypothesis}). report_path may be NULL. */
int reascirc_eval_predictions(const char* predictions_path,
                              const char* report_path, char** report_json);

/* Samples n questions into a human-evaluation CSV. dataset_path (optional)
 * fills the passage/answer columns by joining on id. */
int reascirc_sheet_export(const char* predictions_path,
                          const char* dataset_path, size_t n, uint64_t seed,
                          const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* REASCIRC_H */
