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

#include "dialogforge/corpus.hpp"

namespace dialogforge::hybrid {

enum class Source { kSeq2Seq, kNearestNeighbor };

const char* to_string(Source source);

/// True iff the first token is exactly "api_call".
bool is_api_call(const corpus::Utterance& utterance);

struct HybridDecision {
  corpus::Utterance chosen;
  Source source = Source::kNearestNeighbor;
  corpus::Utterance seq2seq_output;
  corpus::Utterance nn_output;
};

/// The Seq2Seq output wins whenever it is an api_call; otherwise the
/// retrieved response is used.
HybridDecision hybrid_respond(const corpus::Utterance& seq2seq_out,
                              const corpus::Utterance& nn_out);

}  // namespace dialogforge::hybrid
