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

#include "dialogforge/ball_tree.hpp"
#include "dialogforge/checkpoint.hpp"
#include "dialogforge/corpus.hpp"
#include "dialogforge/seq2seq.hpp"

namespace dialogforge::belief {

using seq2seq::Vector;

/// Which hidden state summarizes the dialog so far.
enum class BeliefMode : std::uint8_t { kEncoderFinal = 0, kDecoderFinal = 1, kConcat = 2 };

/// Cosine ranks by angle: vectors are unit-normalized before indexing.
enum class Metric : std::uint8_t { kEuclidean = 0, kCosine = 1 };

std::size_t belief_dim(BeliefMode mode, int hidden_dim);
const char* to_string(BeliefMode mode);
BeliefMode parse_belief_mode(const std::string& text);  // encoder | decoder | concat

/// Belief vector for `mode` from a turn's encoder and decoder final hiddens.
Vector belief_vector(BeliefMode mode, const seq2seq::TurnState& state);

struct StateActionPair {
  Vector bs;
  corpus::Utterance action;
  std::string dialog_id;
  std::uint32_t turn = 0;
};

/// The set S of <belief state, agent action> pairs with a ball-tree index.
/// Immutable after construction.
class StateActionStore {
 public:
  struct Match {
    std::size_t index = 0;
    double distance = 0.0;
    const StateActionPair* pair = nullptr;
  };

  /// An empty pair list is allowed; queries on it throw EmptyStore.
  StateActionStore(BeliefMode mode, std::size_t dim, std::vector<StateActionPair> pairs,
                   std::size_t leaf_size = BallTree::kDefaultLeafSize,
                   Metric metric = Metric::kEuclidean);

  /// Nearest stored pair; ties go to the lowest insertion index.
  /// Throws EmptyStore or DimensionMismatch.
  Match nearest(const Vector& query) const;

  BeliefMode mode() const { return mode_; }
  Metric metric() const { return metric_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return pairs_.size(); }
  std::size_t leaf_size() const { return leaf_size_; }
  const std::vector<StateActionPair>& pairs() const { return pairs_; }
  const std::optional<BallTree>& tree() const { return tree_; }

  /// Binary "BSNN" snapshot; the tree is rebuilt deterministically on load.
  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static StateActionStore load(std::istream& in);
  static StateActionStore load(const std::string& path);

 private:
  Vector prepare(const Vector& v) const;

  BeliefMode mode_;
  Metric metric_;
  std::size_t dim_;
  std::size_t leaf_size_;
  std::vector<StateActionPair> pairs_;
  std::optional<BallTree> tree_;
};

/// Teacher-forced pass over each training dialog, one pair per agent turn.
StateActionStore extract_store(const seq2seq::Model& model, BeliefMode mode,
                               const std::vector<corpus::Dialog>& train_dialogs,
                               std::size_t leaf_size = BallTree::kDefaultLeafSize,
                               Metric metric = Metric::kEuclidean);

/// Belief vector for the current turn of a live history: the encoder state
/// comes from the threaded context; the decoder state from a greedy decode
/// of the current turn when the mode needs it.
struct QueryState {
  Vector bs;
  seq2seq::GreedyDecode decode;  // populated when the mode uses the decoder
};
QueryState query_state(const seq2seq::Model& model, BeliefMode mode,
                       const seq2seq::EncoderOutput& enc);

struct NnPrediction {
  corpus::Utterance response;
  StateActionStore::Match match;
};

/// Retrieval response for the last user turn of `user_history` (user_1..t).
/// Prior agent turns do not enter the encoder-threaded state.
NnPrediction nnb_predict(const seq2seq::Model& model, const StateActionStore& store,
                         const std::vector<corpus::Utterance>& user_history,
                         const std::vector<corpus::Utterance>& agent_history);

}  // namespace dialogforge::belief
