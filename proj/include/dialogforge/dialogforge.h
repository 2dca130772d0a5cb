// Copyright 2026 The DialogForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIALOGFORGE_DIALOGFORGE_H_
#define DIALOGFORGE_DIALOGFORGE_H_

/* C interface to the dialogforge library. Every object is an opaque handle
 * released with its matching *_free function. Functions that can fail return
 * a df_status; on failure df_last_error_message() holds a description for
 * the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIALOGFORGE_BUILDING)
#    define DF_API __declspec(dllexport)
#  else
#    define DF_API __declspec(dllimport)
#  endif
#else
#  define DF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum df_status {
  DF_OK = 0,
  DF_ERR_INVALID_ARGUMENT = 1,
  DF_ERR_IO = 2,
  DF_ERR_PARSE = 3,
  DF_ERR_FORMAT = 4,
  DF_ERR_SHAPE_MISMATCH = 5,
  DF_ERR_DIMENSION_MISMATCH = 6,
  DF_ERR_EMPTY_STORE = 7,
  DF_ERR_TOO_FEW_DIALOGS = 8,
  DF_ERR_DIVERGED = 9,
  DF_ERR_EMPTY_UTTERANCE = 10,
  DF_ERR_OUT_OF_ORDER_TURN = 11,
  DF_ERR_EMPTY_INPUT = 12,
  DF_ERR_USAGE = 13,
  DF_ERR_INTERNAL = 99
} df_status;

typedef enum df_source { DF_SOURCE_SEQ2SEQ = 0, DF_SOURCE_NEAREST_NEIGHBOR = 1 } df_source;

typedef struct df_corpus df_corpus;
typedef struct df_model df_model;
typedef struct df_store df_store;
typedef struct df_session df_session;

typedef struct df_eval_summary {
  int model;
  uint64_t dialogs;
  uint64_t turns;
  double bleu;
  double bleu_turn_mean;
  double eqm;
  double precision;
  double recall;
  double accuracy;
  double avg_gen_len;
  double avg_ref_len;
  uint64_t tp, fp, fn, tn;
  int eqm_degenerate;
  int timing_degenerate;
} df_eval_summary;

DF_API const char* df_version(void);
DF_API const char* df_status_string(df_status status);
/* Message of the last failed call on this thread; "" when none. */
DF_API const char* df_last_error_message(void);

/* ---- corpora ----------------------------------------------------------- */

/* domain: "restaurant" or "support". */
DF_API df_status df_corpus_generate(const char* domain, size_t n_dialogs, int64_t seed,
                                    df_corpus** out);
/* ".jsonl" files are read as JSONL, anything else as bAbI-style text. */
DF_API df_status df_corpus_load(const char* path, df_corpus** out);
DF_API df_status df_corpus_write_text(const df_corpus* corpus, const char* path);
DF_API df_status df_corpus_write_jsonl(const df_corpus* corpus, const char* path);
DF_API size_t df_corpus_dialog_count(const df_corpus* corpus);
DF_API size_t df_corpus_turn_count(const df_corpus* corpus);
DF_API void df_corpus_free(df_corpus* corpus);

/* ---- models ------------------------------------------------------------ */

/* Trains from a JSON run config and writes its checkpoint and loss log.
 * seed_override may be NULL. *out may be NULL when the handle is not
 * needed. */
DF_API df_status df_train_from_config(const char* config_path, const int64_t* seed_override,
                                      df_model** out);
DF_API df_status df_model_load(const char* path, df_model** out);
DF_API df_status df_model_save(const df_model* model, const char* path);
DF_API size_t df_model_vocab_size(const df_model* model);
DF_API int df_model_hidden_dim(const df_model* model);
DF_API int df_model_uses_context(const df_model* model);
DF_API void df_model_free(df_model* model);

/* ---- state-action stores ---------------------------------------------- */

/* mode: "encoder", "decoder" or "concat"; metric: "euclidean" or "cosine"
 * (NULL means euclidean). Pairs come from the checkpoint's training split of
 * `corpus`. */
DF_API df_status df_store_build(const df_model* model, const df_corpus* corpus, const char* mode,
                                const char* metric, size_t leaf_size, df_store** out);
DF_API df_status df_store_load(const char* path, df_store** out);
DF_API df_status df_store_save(const df_store* store, const char* path);
DF_API size_t df_store_size(const df_store* store);
DF_API size_t df_store_dim(const df_store* store);
DF_API const char* df_store_mode(const df_store* store);
/* Nearest stored pair for a raw belief vector of df_store_dim() values. */
DF_API df_status df_store_query(const df_store* store, const double* query, size_t dim,
                                size_t* index, double* distance);
DF_API void df_store_free(df_store* store);

/* ---- evaluation -------------------------------------------------------- */

/* Scores model 1..5 on the checkpoint's test split of `corpus`. store may be
 * NULL for models 1 and 2. report_path and predictions_path may be NULL;
 * summary may be NULL. */
DF_API df_status df_evaluate(const df_model* model, const df_store* store, const df_corpus* corpus,
                             int model_id, unsigned threads, const char* report_path,
                             const char* predictions_path, df_eval_summary* summary);

/* ---- interactive sessions --------------------------------------------- */

/* model and store must outlive the session. */
DF_API df_status df_session_create(const df_model* model, const df_store* store, int model_id,
                                   df_session** out);
/* Raw user text is normalized first; an empty or blank line is <SILENCE>.
 * *response points into the session and stays valid until the next call on
 * it. The response is fed back as the agent turn. */
DF_API df_status df_session_respond(df_session* session, const char* user_text,
                                    const char** response, df_source* source);
DF_API void df_session_reset(df_session* session);
DF_API size_t df_session_turn(const df_session* session);
DF_API void df_session_free(df_session* session);

#ifdef __cplusplus
}
#endif

#endif /* DIALOGFORGE_DIALOGFORGE_H_ */
