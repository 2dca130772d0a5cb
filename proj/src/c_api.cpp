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

#include "dialogforge/dialogforge.h"

#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dialogforge/belief.hpp"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/corpus.hpp"
#include "dialogforge/errors.hpp"
#include "dialogforge/evaluation.hpp"
#include "dialogforge/generators.hpp"
#include "dialogforge/normalize.hpp"
#include "dialogforge/pipeline.hpp"

using namespace dialogforge;

struct df_corpus {
  std::vector<corpus::Dialog> dialogs;
};

struct df_model {
  seq2seq::Model model;
};

struct df_store {
  belief::StateActionStore store;
};

struct df_session {
  const df_model* model = nullptr;
  std::unique_ptr<metrics::Responder> responder;
  std::string last;
  std::size_t turn = 0;
};

namespace {

thread_local std::string g_last_error;

df_status fail(df_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `f` and turns any exception into a status.
template <typename F>
df_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DF_OK;
  } catch (const Error& e) {
    return fail(static_cast<df_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DF_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

bool blank(const char* s) {
  for (; *s; ++s) {
    if (*s != ' ' && *s != '\t' && *s != '\r' && *s != '\n') return false;
  }
  return true;
}

}  // namespace

extern "C" {

const char* df_version(void) { return "0.1.0"; }

const char* df_status_string(df_status status) {
  switch (status) {
    case DF_OK: return "ok";
    case DF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DF_ERR_IO: return "i/o error";
    case DF_ERR_PARSE: return "parse error";
    case DF_ERR_FORMAT: return "format error";
    case DF_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case DF_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case DF_ERR_EMPTY_STORE: return "empty store";
    case DF_ERR_TOO_FEW_DIALOGS: return "too few dialogs";
    case DF_ERR_DIVERGED: return "training diverged";
    case DF_ERR_EMPTY_UTTERANCE: return "empty utterance";
    case DF_ERR_OUT_OF_ORDER_TURN: return "out-of-order turn";
    case DF_ERR_EMPTY_INPUT: return "empty input";
    case DF_ERR_USAGE: return "usage error";
    case DF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* df_last_error_message(void) { return g_last_error.c_str(); }

// ---- corpora

df_status df_corpus_generate(const char* domain, size_t n_dialogs, int64_t seed, df_corpus** out) {
  return guarded([&] {
    require(domain, "domain");
    require(out, "out");
    const std::string d(domain);
    auto c = std::make_unique<df_corpus>();
    if (d == "restaurant") {
      c->dialogs = corpus::generate_restaurant_corpus(n_dialogs, seed);
    } else if (d == "support") {
      c->dialogs = corpus::generate_support_corpus(n_dialogs, seed);
    } else {
      throw Error(ErrorCode::kUsage, "unknown domain '" + d + "' (restaurant|support)");
    }
    *out = c.release();
  });
}

df_status df_corpus_load(const char* path, df_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto c = std::make_unique<df_corpus>();
    c->dialogs = corpus::load_corpus(path);
    *out = c.release();
  });
}

df_status df_corpus_write_text(const df_corpus* c, const char* path) {
  return guarded([&] {
    require(c, "corpus");
    require(path, "path");
    std::ostringstream out;
    corpus::write_babi_text(out, c->dialogs);
    pipeline::write_text_file(path, out.str());
  });
}

df_status df_corpus_write_jsonl(const df_corpus* c, const char* path) {
  return guarded([&] {
    require(c, "corpus");
    require(path, "path");
    std::ostringstream out;
    corpus::write_jsonl(out, c->dialogs);
    pipeline::write_text_file(path, out.str());
  });
}

size_t df_corpus_dialog_count(const df_corpus* c) { return c ? c->dialogs.size() : 0; }

size_t df_corpus_turn_count(const df_corpus* c) {
  return c ? corpus::count_turns(c->dialogs) : 0;
}

void df_corpus_free(df_corpus* c) { delete c; }

// ---- models

df_status df_train_from_config(const char* config_path, const int64_t* seed_override,
                               df_model** out) {
  return guarded([&] {
    require(config_path, "config_path");
    auto config = pipeline::load_run_config(config_path);
    if (seed_override) config.apply_seed(*seed_override);
    auto outcome = pipeline::run_train(config);
    if (out) *out = new df_model{std::move(outcome.model)};
  });
}

df_status df_model_load(const char* path, df_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new df_model{seq2seq::load_checkpoint(std::string(path))};
  });
}

df_status df_model_save(const df_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    seq2seq::save_checkpoint(m->model, std::string(path));
  });
}

size_t df_model_vocab_size(const df_model* m) { return m ? m->model.vocab.size() : 0; }
int df_model_hidden_dim(const df_model* m) { return m ? m->model.config.hidden_dim : 0; }
int df_model_uses_context(const df_model* m) { return m && m->model.config.use_context ? 1 : 0; }
void df_model_free(df_model* m) { delete m; }

// ---- stores

df_status df_store_build(const df_model* m, const df_corpus* c, const char* mode,
                         const char* metric, size_t leaf_size, df_store** out) {
  return guarded([&] {
    require(m, "model");
    require(c, "corpus");
    require(mode, "mode");
    require(out, "out");
    const auto bm = belief::parse_belief_mode(mode);
    auto dm = belief::Metric::kEuclidean;
    if (metric != nullptr) {
      const std::string s(metric);
      if (s == "cosine") dm = belief::Metric::kCosine;
      else if (s != "euclidean") throw Error(ErrorCode::kUsage, "unknown metric '" + s + "'");
    }
    *out = new df_store{pipeline::build_store(m->model, c->dialogs, bm, leaf_size, dm)};
  });
}

df_status df_store_load(const char* path, df_store** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new df_store{belief::StateActionStore::load(std::string(path))};
  });
}

df_status df_store_save(const df_store* s, const char* path) {
  return guarded([&] {
    require(s, "store");
    require(path, "path");
    s->store.save(std::string(path));
  });
}

size_t df_store_size(const df_store* s) { return s ? s->store.size() : 0; }
size_t df_store_dim(const df_store* s) { return s ? s->store.dim() : 0; }
const char* df_store_mode(const df_store* s) {
  return s ? belief::to_string(s->store.mode()) : "";
}

df_status df_store_query(const df_store* s, const double* query, size_t dim, size_t* index,
                         double* distance) {
  return guarded([&] {
    require(s, "store");
    require(query, "query");
    const Eigen::Map<const Eigen::VectorXd> q(query, static_cast<Eigen::Index>(dim));
    const auto m = s->store.nearest(q);
    if (index) *index = m.index;
    if (distance) *distance = m.distance;
  });
}

void df_store_free(df_store* s) { delete s; }

// ---- evaluation

df_status df_evaluate(const df_model* m, const df_store* s, const df_corpus* c, int model_id,
                      unsigned threads, const char* report_path, const char* predictions_path,
                      df_eval_summary* summary) {
  return guarded([&] {
    require(m, "model");
    require(c, "corpus");
    const belief::StateActionStore* store = s ? &s->store : nullptr;
    metrics::check_model_inputs(model_id, m->model, store);
    const auto split = pipeline::split_for(m->model, c->dialogs);
    const auto factory = [&] { return metrics::make_responder(model_id, m->model, store); };
    const auto ev = metrics::evaluate_model(factory, split.test, model_id, threads);
    if (report_path) pipeline::write_text_file(report_path, metrics::report_json(ev.report));
    if (predictions_path) {
      pipeline::write_text_file(predictions_path, metrics::predictions_jsonl(ev.predictions));
    }
    if (summary) {
      const auto& r = ev.report;
      *summary = df_eval_summary{r.model_id,  r.dialogs,   r.turns,       r.bleu,
                                 r.bleu_turn_mean, r.eqm,  r.precision,   r.recall,
                                 r.accuracy,  r.avg_gen_len, r.avg_ref_len, r.counts.tp,
                                 r.counts.fp, r.counts.fn, r.counts.tn,   r.eqm_degenerate,
                                 r.timing_degenerate};
    }
  });
}

// ---- sessions

df_status df_session_create(const df_model* m, const df_store* s, int model_id, df_session** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "out");
    auto session = std::make_unique<df_session>();
    session->model = m;
    session->responder = metrics::make_responder(model_id, m->model, s ? &s->store : nullptr);
    session->responder->reset();
    *out = session.release();
  });
}

df_status df_session_respond(df_session* session, const char* user_text, const char** response,
                             df_source* source) {
  return guarded([&] {
    require(session, "session");
    require(response, "response");
    const char* text = user_text ? user_text : "";
    const auto user = blank(text) ? corpus::Utterance::silence()
                                  : corpus::normalize_utterance(text, corpus::Lexicon::builtin(),
                                                                &session->model->model.vocab);
    auto r = session->responder->respond(user);
    // no ground truth live: the system's own answer becomes the agent turn
    session->responder->observe_agent(r.text);
    ++session->turn;
    session->last = r.text.text();
    *response = session->last.c_str();
    if (source) {
      *source = r.source == hybrid::Source::kSeq2Seq ? DF_SOURCE_SEQ2SEQ
                                                     : DF_SOURCE_NEAREST_NEIGHBOR;
    }
  });
}

void df_session_reset(df_session* session) {
  if (!session) return;
  session->responder->reset();
  session->turn = 0;
}

size_t df_session_turn(const df_session* session) { return session ? session->turn : 0; }

void df_session_free(df_session* session) { delete session; }

}  // extern "C"
