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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dialogforge/belief.hpp"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/corpus.hpp"
#include "dialogforge/hybrid.hpp"
#include "dialogforge/metrics.hpp"

namespace dialogforge::metrics {

/// 1: Seq2Seq without context, 2: HRED Seq2Seq, 3: NN on encoder states,
/// 4: NN on decoder states, 5: hybrid of 2 and 4.
inline constexpr int kMinModelId = 1;
inline constexpr int kMaxModelId = 5;

struct Response {
  corpus::Utterance text;
  hybrid::Source source = hybrid::Source::kSeq2Seq;
};

/// A turn-response function over one dialog at a time.
class Responder {
 public:
  virtual ~Responder() = default;
  /// Starts a new dialog: the next user turn is turn 1.
  virtual void reset() = 0;
  /// Answers the newest user turn given the history seen so far.
  virtual Response respond(const corpus::Utterance& user) = 0;
  /// Records the agent turn that actually followed (ground truth in batch
  /// evaluation, the system's own answer in chat).
  virtual void observe_agent(const corpus::Utterance& /*agent*/) {}
};

using ResponderFactory = std::function<std::unique_ptr<Responder>()>;

/// Throws Usage when the checkpoint or store does not fit `model_id`.
void check_model_inputs(int model_id, const seq2seq::Model& model,
                        const belief::StateActionStore* store);

/// `model` and `store` must outlive the responder.
std::unique_ptr<Responder> make_responder(int model_id, const seq2seq::Model& model,
                                          const belief::StateActionStore* store);

struct Prediction {
  std::string dialog_id;
  std::uint32_t turn = 0;
  corpus::Utterance reference;
  corpus::Utterance prediction;
  hybrid::Source source = hybrid::Source::kSeq2Seq;
};

struct EvalReport {
  int model_id = 0;
  std::size_t dialogs = 0;
  std::size_t turns = 0;
  double bleu = 0.0;
  double bleu_turn_mean = 0.0;
  double eqm = 0.0;
  std::size_t eqm_matches = 0;
  std::size_t eqm_references = 0;
  bool eqm_degenerate = false;
  double precision = 1.0;
  double recall = 1.0;
  double accuracy = 1.0;
  bool timing_degenerate = false;
  ConfusionCounts counts;
  double avg_gen_len = 0.0;
  double avg_ref_len = 0.0;
  std::map<std::string, double> unigram_dist;
};

struct Evaluation {
  EvalReport report;
  std::vector<Prediction> predictions;  // dialog order, then turn order
};

/// Runs every dialog through a fresh responder: each user turn is answered
/// from user_1..t and the true agent_1..t-1, then the true agent turn is fed
/// back. Dialogs are spread over `threads` workers; metrics only use
/// order-free sums, so dialog order and thread count do not change them.
Evaluation evaluate_model(const ResponderFactory& factory,
                          std::span<const corpus::Dialog> test_dialogs, int model_id = 0,
                          unsigned threads = 1);

/// Flat JSON object, keys in fixed order, trailing newline.
std::string report_json(const EvalReport& report);
/// One JSON object per prediction.
std::string predictions_jsonl(std::span<const Prediction> predictions);

}  // namespace dialogforge::metrics
