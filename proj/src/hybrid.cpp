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

#include "dialogforge/hybrid.hpp"

#include "dialogforge/errors.hpp"

namespace dialogforge::hybrid {

const char* to_string(Source source) {
  return source == Source::kSeq2Seq ? "seq2seq" : "nearest_neighbor";
}

bool is_api_call(const corpus::Utterance& utterance) {
  return !utterance.tokens.empty() && utterance.tokens.front() == corpus::kApiCallMarker;
}

HybridDecision hybrid_respond(const corpus::Utterance& seq2seq_out,
                              const corpus::Utterance& nn_out) {
  if (seq2seq_out.tokens.empty() || nn_out.tokens.empty()) {
    throw Error(ErrorCode::kEmptyUtterance, "hybrid inputs must be non-empty");
  }
  const bool api = is_api_call(seq2seq_out);
  return {api ? seq2seq_out : nn_out, api ? Source::kSeq2Seq : Source::kNearestNeighbor,
          seq2seq_out, nn_out};
}

}  // namespace dialogforge::hybrid
