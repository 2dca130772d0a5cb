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

#include "dialogforge/evaluation.hpp"

#include <algorithm>
#include <exception>
#include <sstream>
#include <thread>

#include "dialogforge/errors.hpp"
#include "json.hpp"

namespace dialogforge::metrics {

namespace {

using belief::BeliefMode;
using hybrid::Source;

class Seq2SeqResponder final : public Responder {
 public:
  explicit Seq2SeqResponder(const seq2seq::Model& model)
      : model_(model), history_(model.params, model.config) {}

  void reset() override { history_.reset(); }

  Response respond(const corpus::Utterance& user) override {
    const auto enc = history_.step(model_.vocab.encode(user));
    const auto out = seq2seq::decode_from_encoder(model_.params, model_.config, enc);
    return {seq2seq::to_utterance(out.tokens, model_.vocab), Source::kSeq2Seq};
  }

 private:
  const seq2seq::Model& model_;
  seq2seq::HistoryEncoder history_;
};

class NearestResponder final : public Responder {
 public:
  NearestResponder(const seq2seq::Model& model, const belief::StateActionStore& store,
                   bool hybrid)
      : model_(model), store_(store), history_(model.params, model.config), hybrid_(hybrid) {}

  void reset() override { history_.reset(); }

  Response respond(const corpus::Utterance& user) override {
    const auto enc = history_.step(model_.vocab.encode(user));
    const auto q = belief::query_state(model_, store_.mode(), enc);
    const auto match = store_.nearest(q.bs);
    if (!hybrid_) return {match.pair->action, Source::kNearestNeighbor};
    // decoder and concat stores already ran the greedy decode
    const auto s2s = seq2seq::to_utterance(q.decode.tokens, model_.vocab);
    const auto d = hybrid::hybrid_respond(s2s, match.pair->action);
    return {d.chosen, d.source};
  }

 private:
  const seq2seq::Model& model_;
  const belief::StateActionStore& store_;
  seq2seq::HistoryEncoder history_;
  bool hybrid_;
};

struct DialogResult {
  std::vector<Prediction> predictions;
};

DialogResult run_dialog(Responder& responder, const corpus::Dialog& dialog) {
  DialogResult r;
  responder.reset();
  for (const auto& turn : dialog.turns) {
    auto resp = responder.respond(turn.user);
    r.predictions.push_back({dialog.id, turn.index, turn.agent, std::move(resp.text), resp.source});
    responder.observe_agent(turn.agent);
  }
  return r;
}

}  // namespace

void check_model_inputs(int model_id, const seq2seq::Model& model,
                        const belief::StateActionStore* store) {
  if (model_id < kMinModelId || model_id > kMaxModelId) {
    throw Error(ErrorCode::kUsage, "model must be 1..5, got " + std::to_string(model_id));
  }
  if (model_id == 1 && model.config.use_context) {
    throw Error(ErrorCode::kUsage, "model 1 needs a checkpoint trained with use_context=false");
  }
  if (model_id >= 2 && !model.config.use_context) {
    throw Error(ErrorCode::kUsage, "model " + std::to_string(model_id) +
                                       " needs a checkpoint trained with use_context=true");
  }
  if (model_id <= 2) return;
  if (store == nullptr) {
    throw Error(ErrorCode::kUsage, "model " + std::to_string(model_id) + " requires a store");
  }
  const auto mode = store->mode();
  if (model_id == 3 && mode != BeliefMode::kEncoderFinal) {
    throw Error(ErrorCode::kUsage, "model 3 requires an encoder store, got " +
                                       std::string(belief::to_string(mode)));
  }
  if (model_id >= 4 && mode == BeliefMode::kEncoderFinal) {
    throw Error(ErrorCode::kUsage, "model " + std::to_string(model_id) +
                                       " requires a decoder or concat store");
  }
  if (store->dim() != belief::belief_dim(mode, model.config.hidden_dim)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "store dimension " + std::to_string(store->dim()) +
                    " does not match the checkpoint hidden size");
  }
}

std::unique_ptr<Responder> make_responder(int model_id, const seq2seq::Model& model,
                                          const belief::StateActionStore* store) {
  check_model_inputs(model_id, model, store);
  if (model_id <= 2) return std::make_unique<Seq2SeqResponder>(model);
  return std::make_unique<NearestResponder>(model, *store, model_id == 5);
}

Evaluation evaluate_model(const ResponderFactory& factory,
                          std::span<const corpus::Dialog> test_dialogs, int model_id,
                          unsigned threads) {
  if (test_dialogs.empty()) throw Error(ErrorCode::kEmptyInput, "no dialogs to evaluate");
  const std::size_t n = test_dialogs.size();
  std::vector<DialogResult> results(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));

  auto work = [&](unsigned w, std::exception_ptr& err) {
    try {
      auto responder = factory();
      for (std::size_t i = w; i < n; i += workers) {
        results[i] = run_dialog(*responder, test_dialogs[i]);
      }
    } catch (...) {
      err = std::current_exception();
    }
  };
  std::vector<std::exception_ptr> errors(workers);
  if (workers == 1) {
    work(0, errors[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, std::ref(errors[w]));
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Evaluation ev;
  for (auto& r : results) {
    for (auto& p : r.predictions) ev.predictions.push_back(std::move(p));
  }
  std::vector<corpus::Utterance> preds, refs;
  preds.reserve(ev.predictions.size());
  refs.reserve(ev.predictions.size());
  for (const auto& p : ev.predictions) {
    preds.push_back(p.prediction);
    refs.push_back(p.reference);
  }

  auto& rep = ev.report;
  rep.model_id = model_id;
  rep.dialogs = n;
  rep.turns = preds.size();
  rep.bleu = bleu(preds, refs);
  rep.bleu_turn_mean = mean_sentence_bleu(preds, refs);
  const auto q = eqm(preds, refs);
  rep.eqm = q.value;
  rep.eqm_matches = q.matches;
  rep.eqm_references = q.api_references;
  rep.eqm_degenerate = q.degenerate;
  const auto t = api_timing(preds, refs);
  rep.precision = t.precision;
  rep.recall = t.recall;
  rep.accuracy = t.accuracy;
  rep.timing_degenerate = t.degenerate;
  rep.counts = t.counts;
  const auto d = length_and_unigram_diagnostics(preds, refs);
  rep.avg_gen_len = d.avg_generated_length;
  rep.avg_ref_len = d.avg_reference_length;
  rep.unigram_dist = d.unigram_distribution;
  return ev;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_id;
  j["dialogs"] = r.dialogs;
  j["turns"] = r.turns;
  j["bleu"] = r.bleu;
  j["bleu_turn_mean"] = r.bleu_turn_mean;
  j["eqm"] = r.eqm;
  j["eqm_matches"] = r.eqm_matches;
  j["eqm_references"] = r.eqm_references;
  j["eqm_degenerate"] = r.eqm_degenerate;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["accuracy"] = r.accuracy;
  j["timing_degenerate"] = r.timing_degenerate;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["tn"] = r.counts.tn;
  j["avg_gen_len"] = r.avg_gen_len;
  j["avg_ref_len"] = r.avg_ref_len;
  nlohmann::ordered_json uni = nlohmann::ordered_json::object();
  for (const auto& [tok, f] : r.unigram_dist) uni[tok] = f;
  j["unigram_dist"] = std::move(uni);
  return j.dump(2) + "\n";
}

std::string predictions_jsonl(std::span<const Prediction> predictions) {
  std::ostringstream out;
  for (const auto& p : predictions) {
    nlohmann::ordered_json j;
    j["dialog_id"] = p.dialog_id;
    j["turn"] = p.turn;
    j["reference"] = p.reference.text();
    j["prediction"] = p.prediction.text();
    j["source"] = hybrid::to_string(p.source);
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace dialogforge::metrics
