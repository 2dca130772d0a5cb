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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/errors.hpp"
#include "dialogforge/generators.hpp"
#include "dialogforge/rng.hpp"
#include "dialogforge/seq2seq.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace dialogforge;
using namespace dialogforge::seq2seq;
using dftest::make_dialog;

namespace {

struct Fixture {
  std::vector<corpus::Dialog> dialogs;
  corpus::Vocabulary vocab;
  std::vector<EncodedDialog> encoded;
};

Fixture support_fixture(std::size_t n, std::int64_t seed = 1) {
  Fixture f;
  f.dialogs = corpus::generate_support_corpus(n, seed);
  f.vocab = corpus::build_vocabulary(f.dialogs, 1);
  f.encoded = encode_dialogs(f.dialogs, f.vocab);
  return f;
}

bool same(const Seq2SeqParams& a, const Seq2SeqParams& b) {
  std::vector<const double*> pa;
  std::vector<Eigen::Index> na;
  a.for_each([&](std::string_view, const auto& t) {
    pa.push_back(t.data());
    na.push_back(t.size());
  });
  std::size_t k = 0;
  bool eq = true;
  b.for_each([&](std::string_view, const auto& t) {
    eq = eq && t.size() == na[k] && std::equal(t.data(), t.data() + t.size(), pa[k]);
    ++k;
  });
  return eq;
}

}  // namespace

TEST_CASE("decoder targets end with EOS") {
  CHECK(decoder_targets({7, 8}) == TokenIds{7, 8, corpus::kEos});
  CHECK(decoder_targets({}) == TokenIds{corpus::kEos});
}

TEST_CASE("softmax columns are distributions") {
  const auto f = support_fixture(6);
  const auto config = dftest::tiny_config(true);
  const auto params = Seq2SeqParams::initialize(config, f.vocab.size(), 3);
  for (const auto& d : f.encoded) {
    const auto fw = forward_dialog(params, config, d);
    REQUIRE(fw.distributions.size() == d.turns.size());
    for (std::size_t t = 0; t < d.turns.size(); ++t) {
      const auto& p = fw.distributions[t];
      CHECK(p.cols() == static_cast<Eigen::Index>(d.turns[t].agent.size() + 1));
      CHECK(p.minCoeff() >= 0.0);
      for (Eigen::Index j = 0; j < p.cols(); ++j) CHECK(std::abs(p.col(j).sum() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("loss identities") {
  const std::vector<TokenIds> targets{{1, 2}, {3}};
  SUBCASE("probability one on every target") {
    std::vector<Matrix> p{Matrix::Zero(5, 2), Matrix::Zero(5, 1)};
    p[0](1, 0) = p[0](2, 1) = p[1](3, 0) = 1.0;
    CHECK(loss(p, targets) == 0.0);
  }
  SUBCASE("uniform") {
    std::vector<Matrix> p{Matrix::Constant(5, 2, 0.2), Matrix::Constant(5, 1, 0.2)};
    CHECK(loss(p, targets) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  }
  SUBCASE("hand-built three tokens, PAD skipped") {
    std::vector<Matrix> p{Matrix::Constant(4, 4, 0.25)};
    p[0](1, 0) = 0.5;
    p[0](2, 1) = 0.1;
    p[0](3, 2) = 0.8;
    const std::vector<TokenIds> t{{1, 2, 3, corpus::kPad}};
    const double expected = -(std::log(0.5) + std::log(0.1) + std::log(0.8)) / 3.0;
    CHECK(loss(p, t) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("shape mismatch") {
    std::vector<Matrix> p{Matrix::Constant(5, 3, 0.2), Matrix::Constant(5, 1, 0.2)};
    CHECK_THROWS_AS(loss(p, targets), Error);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  const auto gc = dftest::run_gradient_check();
  CHECK(gc.vocab_size == 12);
  REQUIRE(gc.tensors.size() == 9);
  for (const auto& t : gc.tensors) CHECK_MESSAGE(t.max_rel_error < 1e-4, t.name, " ", t.max_rel_error);
}

TEST_CASE("global norm clipping") {
  const auto config = dftest::tiny_config();
  auto g = Seq2SeqParams::zeros(config, 9);
  Rng rng(2);
  g.for_each([&](std::string_view, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.unit() - 0.5;
  });
  const double raw = std::sqrt(g.squared_norm());
  g.for_each([&](std::string_view, auto& t) { t *= 10.0 / raw; });
  CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(clip_global_norm(g, 1.0) - 1.0) < 1e-9);
  CHECK(std::abs(std::sqrt(g.squared_norm()) - 1.0) < 1e-9);
  // below the threshold nothing changes
  CHECK(clip_global_norm(g, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("backward is independent of the thread count") {
  const auto f = support_fixture(8);
  const auto config = dftest::tiny_config(true);
  const auto params = Seq2SeqParams::initialize(config, f.vocab.size(), 4);
  Seq2SeqParams g1, g3;
  const auto r1 = backward(params, config, f.encoded, g1, 5.0, 1);
  const auto r3 = backward(params, config, f.encoded, g3, 5.0, 3);
  CHECK(r1.loss == r3.loss);
  CHECK(r1.tokens == r3.tokens);
  CHECK(same(g1, g3));
  CHECK(r1.loss == doctest::Approx(batch_loss(params, config, f.encoded)).epsilon(1e-12));
}

TEST_CASE("turns are independent without context") {
  const auto f = support_fixture(5);
  const auto config = dftest::tiny_config(false);
  const auto params = Seq2SeqParams::initialize(config, f.vocab.size(), 8);
  Rng rng(6);
  for (const auto& d : f.encoded) {
    auto perm = d;
    rng.shuffle(perm.turns);
    const auto a = forward_dialog(params, config, d);
    const auto b = forward_dialog(params, config, perm);
    for (std::size_t i = 0; i < perm.turns.size(); ++i) {
      const auto it = std::find_if(d.turns.begin(), d.turns.end(), [&](const EncodedTurn& t) {
        return t.user == perm.turns[i].user && t.agent == perm.turns[i].agent;
      });
      const auto j = static_cast<std::size_t>(it - d.turns.begin());
      CHECK(a.distributions[j] == b.distributions[i]);
    }
  }
}

TEST_CASE("context models do depend on earlier turns") {
  const auto config = dftest::tiny_config(true);
  const corpus::Vocabulary v({"a", "b", "c"});
  const auto params = Seq2SeqParams::initialize(config, v.size(), 9);
  const auto d1 = encode_dialog(make_dialog("x", {{"a", "b"}, {"c", "a"}}), v);
  const auto d2 = encode_dialog(make_dialog("y", {{"b", "b"}, {"c", "a"}}), v);
  CHECK_FALSE(forward_dialog(params, config, d1).distributions[1] ==
              forward_dialog(params, config, d2).distributions[1]);
}

TEST_CASE("training with learning rate 0 leaves parameters unchanged") {
  const auto f = support_fixture(10);
  const auto config = dftest::tiny_config(true);
  const auto init = Seq2SeqParams::initialize(config, f.vocab.size(), 1);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 4;
  tc.learning_rate = 0.0;
  const auto r = train(init, config, tc, f.encoded, {});
  CHECK(r.history.size() == 3);
  CHECK(same(r.params, init));
}

TEST_CASE("training is deterministic for a seed") {
  const auto f = support_fixture(12);
  const auto config = dftest::tiny_config(true);
  const auto init = Seq2SeqParams::initialize(config, f.vocab.size(), 1);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.learning_rate = 1e-2;
  tc.seed = 17;
  const std::span<const EncodedDialog> all(f.encoded);
  const auto a = train(init, config, tc, all.subspan(0, 10), all.subspan(10));
  const auto b = train(init, config, tc, all.subspan(0, 10), all.subspan(10));
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].val_loss == b.history[i].val_loss);
  }
  CHECK(same(a.params, b.params));
  // best-so-far column never increases
  for (std::size_t i = 1; i < a.history.size(); ++i) {
    CHECK(a.history[i].best_val_loss <= a.history[i - 1].best_val_loss);
  }
}

TEST_CASE("fifty restaurant dialogs over 30 epochs at least halve the loss") {
  const auto dialogs = corpus::generate_restaurant_corpus(50, 2);
  const auto vocab = corpus::build_vocabulary(dialogs, 1);
  const auto enc = encode_dialogs(dialogs, vocab);
  ModelConfig config;
  config.embed_dim = 16;
  config.hidden_dim = 32;
  TrainConfig tc;
  tc.epochs = 30;
  tc.batch_size = 8;
  tc.learning_rate = 5e-3;
  tc.seed = 3;
  const auto r = train(Seq2SeqParams::initialize(config, vocab.size(), 3), config, tc, enc, {});
  REQUIRE(r.history.size() == 31);
  MESSAGE("initial ", r.history.front().train_loss, " final ", r.history.back().train_loss);
  CHECK(r.history.back().train_loss < 0.5 * r.history.front().train_loss);
}

TEST_CASE("non-finite loss raises Diverged") {
  const auto f = support_fixture(4);
  const auto config = dftest::tiny_config(true);
  auto init = Seq2SeqParams::initialize(config, f.vocab.size(), 1);
  init.output_b[5] = std::numeric_limits<double>::quiet_NaN();
  TrainConfig tc;
  tc.epochs = 1;
  try {
    train(init, config, tc, f.encoded, {});
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDiverged);
  }
}

TEST_CASE("greedy decoding ties go to the lowest id and respect the cap") {
  auto config = dftest::tiny_config(true);
  config.max_decode_len = 2;
  const corpus::Vocabulary v({"a", "b", "c"});
  auto params = Seq2SeqParams::zeros(config, v.size());
  params.output_b[6] = 1.0;
  params.output_b[7] = 1.0;
  const auto out = decode_greedy(params, config, {5}, nullptr);
  CHECK(out.tokens == TokenIds{6, 6});
  CHECK(out.state.truncated);
  params.output_b[corpus::kEos] = 2.0;
  const auto stop = decode_greedy(params, config, {5}, nullptr);
  CHECK(stop.tokens.empty());
  CHECK_FALSE(stop.state.truncated);
  CHECK(to_utterance(stop.tokens, v).is_silence());
}

TEST_CASE("context misuse is a shape mismatch") {
  const auto config = dftest::tiny_config(false);
  const auto params = Seq2SeqParams::initialize(config, 8, 1);
  const Vector ctx = Vector::Zero(config.hidden_dim);
  try {
    encode_turn(params, config, {5}, &ctx);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
}

TEST_CASE("history encoder threads the encoder final state") {
  const auto config = dftest::tiny_config(true);
  const auto params = Seq2SeqParams::initialize(config, 9, 2);
  HistoryEncoder h(params, config);
  const auto a = h.step({5, 6});
  REQUIRE(h.context() != nullptr);
  CHECK(*h.context() == a.h);
  const auto b = h.step({7});
  CHECK(b.h == encode_turn(params, config, {7}, &a.h).h);
  h.reset();
  CHECK(h.context() == nullptr);
  CHECK(h.step({5, 6}).h == a.h);
}
