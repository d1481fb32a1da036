/* Copyright 2026 The channelsum Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libchannelsum.
 *
 * Every function returns a cs_status. On failure a description is available
 * from cs_last_error() until the next call on the same thread. Paths are
 * UTF-8; "-" as an output path means stdout. Output string buffers are
 * NUL-terminated; when `cap` is too small the call fails with
 * CS_ERR_INVALID_ARGUMENT and writes nothing.
 */

#ifndef CHANNELSUM_CHANNELSUM_H_
#define CHANNELSUM_CHANNELSUM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CS_API __declspec(dllexport)
#else
#define CS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_INVALID_ARGUMENT = 1,
  CS_ERR_IO = 2,
  CS_ERR_MALFORMED_RECORD = 3,
  CS_ERR_MALFORMED_LINE = 4,
  CS_ERR_DIM_MISMATCH = 5,
  CS_ERR_SHAPE_MISMATCH = 6,
  CS_ERR_NOT_SCALAR = 7,
  CS_ERR_EMPTY_INPUT = 8,
  CS_ERR_EMPTY_SENTENCE = 9,
  CS_ERR_EMPTY_AFTER_FILTER = 10,
  CS_ERR_TOO_SHORT_DOCUMENT = 11,
  CS_ERR_NON_FINITE_LOSS = 12,
  CS_ERR_VERSION_MISMATCH = 13,
  CS_ERR_CORRUPT_BLOB = 14,
  CS_ERR_ID_MISMATCH = 15,
  CS_ERR_NON_FINITE_VALUE = 16,
  CS_ERR_INTERNAL = 99
} cs_status;

CS_API const char* cs_version(void);
/* Stable name of a status, e.g. "ShapeMismatch". */
CS_API const char* cs_status_name(cs_status status);
/* Message of the last failed call on this thread, "" if none. */
CS_API const char* cs_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct cs_train_config {
  double lr;
  double alpha;
  double dropout;
  uint64_t epochs; /* total, counting epochs already in a checkpoint */
  uint64_t seed;
  size_t hidden;
  size_t emb_dim;
  double adam_beta1;
  double adam_beta2;
  double adam_eps;
  size_t workers;
  size_t log_every;
} cs_train_config;

CS_API void cs_train_config_default(cs_train_config* config);
/* Writes the config as a single-line JSON object. */
CS_API cs_status cs_train_config_json(const cs_train_config* config, char* buf, size_t cap);

/* ---- corpus ----------------------------------------------------------- */

/* Normalizes and filters every record of `in`, writes the kept records to
 * `out` and a vocabulary of at most `vocab_size` words (plus the two special
 * tokens) to `vocab_out`. Records that end up empty are skipped. */
CS_API cs_status cs_preprocess(const char* in, const char* out, const char* vocab_out,
                               size_t vocab_size, size_t* n_kept, size_t* n_skipped);

/* One debug record per usable pair: the input fields plus the sampled
 * positive and negative candidates and their positions. */
CS_API cs_status cs_make_contrastive(const char* corpus, const char* vocab, const char* out,
                                     uint64_t seed, size_t* n_ok, size_t* n_failed);

/* ---- models ----------------------------------------------------------- */

typedef struct cs_model cs_model;

/* Fresh model. `embeddings` (text, "token v1 .. vN" per line) may be NULL,
 * in which case every row is random. */
CS_API cs_status cs_model_init(const char* vocab, const char* embeddings,
                               const cs_train_config* config, cs_model** out);
/* `expected` may be NULL; otherwise its hidden/emb_dim must match the
 * checkpoint. The vocabulary must be the one the checkpoint was built with. */
CS_API cs_status cs_model_load(const char* checkpoint, const char* vocab,
                               const cs_train_config* expected, cs_model** out);
CS_API cs_status cs_model_save(const cs_model* model, const char* path);
CS_API void cs_model_free(cs_model* model);

/* Config stored with the model (the one of the last training call). */
CS_API cs_status cs_model_config(const cs_model* model, cs_train_config* out);
CS_API cs_status cs_model_epochs_done(const cs_model* model, uint64_t* out);
/* *equal = 1 when the parameters are bit-identical and, unless params_only,
 * so are the optimizer state and counters. */
CS_API cs_status cs_model_equal(const cs_model* a, const cs_model* b, int params_only,
                                int* equal);

typedef struct cs_step_info {
  uint64_t epoch;
  uint64_t step;
  const char* id;
  double total;
  double con;
  double penal;
  double margin;
} cs_step_info;

typedef void (*cs_step_callback)(const cs_step_info* info, void* user);

typedef struct cs_train_stats {
  uint64_t steps;
  uint64_t skipped_pairs;   /* documents too short for a contrastive pair */
  uint64_t skipped_records; /* records empty after preprocessing */
  double mean_loss;
} cs_train_stats;

/* Trains until config->epochs epochs are done. `callback` may be NULL. */
CS_API cs_status cs_model_train(cs_model* model, const char* corpus,
                                const cs_train_config* config, cs_step_callback callback,
                                void* user, cs_train_stats* stats);

/* Greedy extraction of `l` sentences per record of `in`. Failed records are
 * logged and counted in n_failed; the call still returns CS_OK. */
CS_API cs_status cs_extract_file(const cs_model* model, const char* in, const char* out,
                                 size_t l, size_t workers, size_t* n_ok, size_t* n_failed);

/* Attention of every document sentence over the gold summary, one JSON
 * object per record. */
CS_API cs_status cs_export_attention(const cs_model* model, const char* corpus, const char* out,
                                     size_t* n_ok, size_t* n_failed);

/* ---- evaluation ------------------------------------------------------- */

typedef enum cs_eval_mode { CS_EVAL_FULL_F1 = 0, CS_EVAL_LIMITED_RECALL = 1 } cs_eval_mode;

typedef struct cs_rouge_report {
  double rouge1;
  double rouge2;
  double rougeL;
  size_t n;
} cs_rouge_report;

/* Scores are percentages. `json` (may be NULL) receives the report line. */
CS_API cs_status cs_evaluate(const char* hyp, const char* ref, cs_eval_mode mode,
                             size_t byte_budget, cs_rouge_report* report, char* json,
                             size_t cap);

/* ---- verification harnesses ------------------------------------------ */

typedef struct cs_gradcheck_config {
  uint64_t seed;
  size_t hidden;
  size_t emb_dim;
  size_t vocab;
  size_t doc_sentences;
  size_t summary_sentences;
  size_t max_tokens;
  double alpha;
  double dropout;
  double epsilon;
  double tolerance;
  int zero_weights;
} cs_gradcheck_config;

typedef struct cs_gradcheck_report {
  double max_rel_err;
  char worst_param[64];
  int passed;
} cs_gradcheck_report;

CS_API void cs_gradcheck_config_default(cs_gradcheck_config* config);
/* `json` (may be NULL) receives the full per-tensor report. */
CS_API cs_status cs_gradcheck(const cs_gradcheck_config* config, cs_gradcheck_report* report,
                              char* json, size_t cap);

typedef struct cs_synthetic_config {
  uint64_t seed;
  size_t train_pairs;
  size_t heldout_pairs;
  size_t doc_sentences;
  size_t topic_sentences;
  size_t vocab_words;
  size_t topic_words;
  size_t words_per_topic;
  size_t min_tokens;
  size_t max_tokens;
  size_t hidden;
  size_t emb_dim;
  uint64_t epochs;
  double lr;
  double alpha;
  double dropout;
  size_t l;
} cs_synthetic_config;

typedef struct cs_synthetic_result {
  double alpha;
  uint64_t epochs;
  double final_epoch_loss;
  double mean_margin;
  double margin_positive;
  double drawn_margin_positive;
  double topic_recovery;
  double mean_topics_recovered;
  double seconds;
} cs_synthetic_result;

CS_API void cs_synthetic_config_default(cs_synthetic_config* config);
CS_API cs_status cs_synthetic_config_json(const cs_synthetic_config* config, char* buf,
                                          size_t cap);
/* Writes the generated train and held-out corpora. */
CS_API cs_status cs_synthetic_write(const cs_synthetic_config* config, const char* train,
                                    const char* heldout);
CS_API cs_status cs_synthetic_run(const cs_synthetic_config* config, cs_synthetic_result* result);
/* One run per alpha; `results` holds n_alphas entries. `table` (may be NULL)
 * receives a markdown comparison table. */
CS_API cs_status cs_ablate(const cs_synthetic_config* config, const double* alphas,
                           size_t n_alphas, cs_synthetic_result* results, char* table,
                           size_t cap);

#ifdef __cplusplus
}
#endif

#endif /* CHANNELSUM_CHANNELSUM_H_ */
