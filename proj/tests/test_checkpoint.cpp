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

#include <sstream>

#include "doctest.h"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/errors.hpp"
#include "dialogforge/generators.hpp"
#include "test_util.hpp"

using namespace dialogforge;
using namespace dialogforge::seq2seq;

namespace {

Model small_model() {
  const auto dialogs = corpus::generate_restaurant_corpus(4, 1);
  Model m;
  m.config = dftest::tiny_config(true);
  m.vocab = corpus::build_vocabulary(dialogs, 1);
  m.params = Seq2SeqParams::initialize(m.config, m.vocab.size(), 12);
  m.split_seed = -42;
  m.min_count = 2;
  return m;
}

std::string bytes(const Model& m) {
  std::stringstream ss;
  save_checkpoint(m, ss);
  return ss.str();
}

ErrorCode load_error(const std::string& data) {
  std::stringstream ss(data);
  try {
    load_checkpoint(ss);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST_CASE("checkpoint round trip reproduces distributions bit for bit") {
  const auto m = small_model();
  std::stringstream ss(bytes(m));
  const auto back = load_checkpoint(ss);
  CHECK(back.config == m.config);
  CHECK(back.vocab.tokens() == m.vocab.tokens());
  CHECK(back.split_seed == -42);
  CHECK(back.min_count == 2);
  CHECK(bytes(back) == bytes(m));
  const auto d = encode_dialog(corpus::generate_restaurant_corpus(4, 1)[0], m.vocab);
  const auto a = forward_dialog(m.params, m.config, d);
  const auto b = forward_dialog(back.params, back.config, d);
  for (std::size_t t = 0; t < a.distributions.size(); ++t) {
    CHECK(a.distributions[t] == b.distributions[t]);
  }
}

TEST_CASE("checkpoint file round trip") {
  const auto dir = dftest::scratch_dir("ckpt");
  const auto m = small_model();
  save_checkpoint(m, (dir / "m.s2s").string());
  CHECK(bytes(load_checkpoint((dir / "m.s2s").string())) == bytes(m));
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.s2s").string()), Error);
}

TEST_CASE("corrupt and truncated checkpoints are format errors") {
  const auto good = bytes(small_model());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(load_error(bad_magic) == ErrorCode::kFormat);
  CHECK(load_error(good.substr(0, good.size() - 3)) == ErrorCode::kFormat);
  CHECK(load_error(good.substr(0, 10)) == ErrorCode::kFormat);
  CHECK(load_error("") == ErrorCode::kFormat);
  auto bad_version = good;
  bad_version[4] = 9;
  CHECK(load_error(bad_version) == ErrorCode::kFormat);
}
