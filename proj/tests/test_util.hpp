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

#include <filesystem>
#include <string>
#include <vector>

#include "dialogforge/corpus.hpp"
#include "dialogforge/generators.hpp"
#include "dialogforge/seq2seq.hpp"

namespace dftest {

using namespace dialogforge;

inline corpus::Utterance utt(const std::string& text) { return corpus::Utterance::from_text(text); }

inline corpus::Dialog make_dialog(const std::string& id,
                                  const std::vector<std::pair<std::string, std::string>>& turns) {
  corpus::Dialog d;
  d.id = id;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    d.turns.push_back({utt(turns[i].first), utt(turns[i].second), static_cast<std::uint32_t>(i + 1)});
  }
  return d;
}

inline seq2seq::ModelConfig tiny_config(bool use_context = true) {
  seq2seq::ModelConfig c;
  c.embed_dim = 4;
  c.hidden_dim = 6;
  c.max_decode_len = 8;
  c.use_context = use_context;
  return c;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("dialogforge_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace dftest
