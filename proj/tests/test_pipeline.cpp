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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/errors.hpp"
#include "dialogforge/generators.hpp"
#include "dialogforge/pipeline.hpp"
#include "test_util.hpp"

using namespace dialogforge;
using namespace dialogforge::pipeline;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run config defaults and fields") {
  const auto d = parse_run_config("{}");
  CHECK(d.model.embed_dim == 64);
  CHECK(d.model.hidden_dim == 128);
  CHECK(d.train.epochs == 30);
  CHECK(d.train.batch_size == 16);
  CHECK(d.train.learning_rate == 1e-3);
  CHECK(d.train.gradient_clip_norm == 5.0);
  CHECK(d.belief_mode == belief::BeliefMode::kDecoderFinal);
  CHECK(d.metric == belief::Metric::kEuclidean);

  const auto c = parse_run_config(R"({"corpus": "c.txt", "seed": -3, "belief_mode": "concat",
      "metric": "cosine", "model": {"hidden_dim": 9, "use_context": false},
      "train": {"epochs": 2, "threads": 2}})");
  CHECK(c.corpus == "c.txt");
  CHECK(c.seed == -3);
  CHECK(c.train.seed == -3);
  CHECK(c.belief_mode == belief::BeliefMode::kConcat);
  CHECK(c.metric == belief::Metric::kCosine);
  CHECK(c.model.hidden_dim == 9);
  CHECK_FALSE(c.model.use_context);
  CHECK(c.train.epochs == 2);
  CHECK(c.train.threads == 2);
}

TEST_CASE("run config errors") {
  CHECK(parse_error("{not json") == ErrorCode::kParse);
  CHECK(parse_error("[]") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"corpuss": "x"})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"model": {"depth": 2}})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"seed": "seven"})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"belief_mode": "both"})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"metric": "manhattan"})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"train": {"epochs": 0}})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"model": {"max_decode_len": 1}})") == ErrorCode::kUsage);
  CHECK(parse_error(R"({"leaf_size": 0})") == ErrorCode::kUsage);
}

TEST_CASE("seed from the environment") {
  ::unsetenv(kSeedEnvVar);
  CHECK_FALSE(seed_from_env().has_value());
  ::setenv(kSeedEnvVar, "-12", 1);
  CHECK(seed_from_env() == -12);
  ::setenv(kSeedEnvVar, "12x", 1);
  CHECK_THROWS_AS(seed_from_env(), Error);
  ::unsetenv(kSeedEnvVar);
}

TEST_CASE("loss log format") {
  std::ostringstream out;
  write_loss_log(out, {{0, 2.5, 2.75, 2.75}, {1, 0.1, 0.2, 0.2}});
  CHECK(out.str() == "epoch\ttrain_loss\tval_loss\tbest_val_loss\n0\t2.5\t2.75\t2.75\n"
                     "1\t0.10000000000000001\t0.20000000000000001\t0.20000000000000001\n");
}

TEST_CASE("train run writes a loadable checkpoint and a loss log") {
  const auto dir = dftest::scratch_dir("pipeline");
  const auto dialogs = corpus::generate_restaurant_corpus(20, 4);
  {
    std::ofstream out(dir / "c.txt");
    corpus::write_babi_text(out, dialogs);
  }
  RunConfig cfg;
  cfg.corpus = (dir / "c.txt").string();
  cfg.checkpoint = (dir / "m.s2s").string();
  cfg.loss_log = (dir / "loss.tsv").string();
  cfg.model = dftest::tiny_config(true);
  cfg.train.epochs = 3;
  cfg.train.batch_size = 4;
  cfg.train.learning_rate = 1e-2;
  cfg.apply_seed(9);
  const auto outcome = run_train(cfg);
  const auto back = seq2seq::load_checkpoint(cfg.checkpoint);
  CHECK(back.split_seed == 9);
  CHECK(back.vocab.tokens() == outcome.model.vocab.tokens());

  std::istringstream log(read_all(cfg.loss_log));
  std::string line;
  std::getline(log, line);
  CHECK(line == "epoch\ttrain_loss\tval_loss\tbest_val_loss");
  double prev = 1e300;
  int rows = 0;
  while (std::getline(log, line)) {
    std::istringstream row(line);
    int epoch = 0;
    double tr = 0, va = 0, best = 0;
    row >> epoch >> tr >> va >> best;
    CHECK(epoch == rows);
    CHECK(best <= prev);
    prev = best;
    ++rows;
  }
  CHECK(rows == 4);

  // same seed, same bytes
  const auto first = read_all(cfg.checkpoint);
  run_train(cfg);
  CHECK(read_all(cfg.checkpoint) == first);

  // the store covers every agent turn of the training split
  const auto store = build_store(back, dialogs, belief::BeliefMode::kDecoderFinal, 32);
  CHECK(store.size() == corpus::count_turns(split_for(back, dialogs).train));
}

TEST_CASE("missing corpus is an IO error") {
  RunConfig cfg;
  cfg.corpus = "/nonexistent/corpus.txt";
  cfg.checkpoint = "/tmp/x.s2s";
  try {
    run_train(cfg);
    FAIL("expected IO error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  RunConfig empty;
  CHECK_THROWS_AS(run_train(empty), Error);
}
