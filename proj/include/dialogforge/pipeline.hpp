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
#include <optional>
#include <string>
#include <vector>

#include "dialogforge/belief.hpp"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/corpus.hpp"
#include "dialogforge/seq2seq.hpp"

namespace dialogforge::pipeline {

inline constexpr const char* kSeedEnvVar = "DIALOGFORGE_SEED";

/// Everything a run needs. Relative paths are taken relative to the
/// working directory.
struct RunConfig {
  std::string corpus;
  std::string checkpoint;
  std::string store;
  std::string report;
  std::string predictions;
  std::string loss_log;
  seq2seq::ModelConfig model;
  seq2seq::TrainConfig train;
  belief::BeliefMode belief_mode = belief::BeliefMode::kDecoderFinal;
  belief::Metric metric = belief::Metric::kEuclidean;
  std::int64_t seed = 0;
  std::uint32_t min_count = 1;
  std::size_t leaf_size = 32;

  /// Copies `seed` into every stochastic component.
  void apply_seed(std::int64_t s);
};

/// Unknown keys are rejected. Throws Parse on malformed JSON, Usage on bad
/// values.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// DIALOGFORGE_SEED when set; Usage error when it is not an integer.
std::optional<std::int64_t> seed_from_env();

/// Streams derived from the run seed.
std::int64_t init_seed(std::int64_t seed);

struct TrainOutcome {
  seq2seq::Model model;
  std::vector<seq2seq::EpochLoss> history;
  int best_epoch = 0;
};

/// Splits `dialogs` with the run seed, builds the vocabulary from the train
/// part and trains.
TrainOutcome train_model(const RunConfig& config, const std::vector<corpus::Dialog>& dialogs);

/// Tab-separated: epoch, train_loss, val_loss, best_val_loss.
void write_loss_log(std::ostream& out, const std::vector<seq2seq::EpochLoss>& history);

/// Loads the corpus, trains, writes the checkpoint and the loss log.
TrainOutcome run_train(const RunConfig& config);

/// The split the checkpoint was trained on.
corpus::CorpusSplit split_for(const seq2seq::Model& model,
                              const std::vector<corpus::Dialog>& dialogs);

/// State-action store from the training part of `dialogs`.
belief::StateActionStore build_store(const seq2seq::Model& model,
                                     const std::vector<corpus::Dialog>& dialogs,
                                     belief::BeliefMode mode, std::size_t leaf_size,
                                     belief::Metric metric = belief::Metric::kEuclidean);

/// Writes `text` to `path`, replacing it. Throws Io.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dialogforge::pipeline
