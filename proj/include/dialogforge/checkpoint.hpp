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
#include <iosfwd>
#include <string>

#include "dialogforge/corpus.hpp"
#include "dialogforge/seq2seq.hpp"

namespace dialogforge::seq2seq {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// A trained model together with everything needed to reproduce its data
/// view: the vocabulary and the seed that split its training corpus.
struct Model {
  ModelConfig config;
  corpus::Vocabulary vocab;
  Seq2SeqParams params;
  std::int64_t split_seed = 0;
  std::uint32_t min_count = 1;
};

/// Binary "S2SD" checkpoint; see docs/formats.md for the byte layout.
void save_checkpoint(const Model& model, std::ostream& out);
Model load_checkpoint(std::istream& in);

void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

}  // namespace dialogforge::seq2seq
