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

#include "dialogforge/belief.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "dialogforge/errors.hpp"

namespace dialogforge::belief {

namespace {
constexpr char kMagic[5] = "BSNN";
constexpr std::uint32_t kStoreVersion = 1;
}  // namespace

std::size_t belief_dim(BeliefMode mode, int hidden_dim) {
  const auto h = static_cast<std::size_t>(hidden_dim);
  return mode == BeliefMode::kConcat ? 2 * h : h;
}

const char* to_string(BeliefMode mode) {
  switch (mode) {
    case BeliefMode::kEncoderFinal: return "encoder";
    case BeliefMode::kDecoderFinal: return "decoder";
    case BeliefMode::kConcat: return "concat";
  }
  return "unknown";
}

BeliefMode parse_belief_mode(const std::string& text) {
  if (text == "encoder") return BeliefMode::kEncoderFinal;
  if (text == "decoder") return BeliefMode::kDecoderFinal;
  if (text == "concat") return BeliefMode::kConcat;
  throw Error(ErrorCode::kUsage, "unknown belief mode '" + text + "' (encoder|decoder|concat)");
}

Vector belief_vector(BeliefMode mode, const seq2seq::TurnState& state) {
  switch (mode) {
    case BeliefMode::kEncoderFinal: return state.encoder_final;
    case BeliefMode::kDecoderFinal: return state.decoder_final;
    case BeliefMode::kConcat: {
      Vector v(state.encoder_final.size() + state.decoder_final.size());
      v << state.encoder_final, state.decoder_final;
      return v;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "bad belief mode");
}

// ---------------------------------------------------------------------------

StateActionStore::StateActionStore(BeliefMode mode, std::size_t dim,
                                   std::vector<StateActionPair> pairs, std::size_t leaf_size,
                                   Metric metric)
    : mode_(mode), metric_(metric), dim_(dim), leaf_size_(leaf_size), pairs_(std::move(pairs)) {
  if (leaf_size_ == 0) throw Error(ErrorCode::kInvalidArgument, "leaf_size must be positive");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (static_cast<std::size_t>(p.bs.size()) != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "pair " + std::to_string(i) + " has dimension " +
                                                     std::to_string(p.bs.size()) + ", store expects " +
                                                     std::to_string(dim_));
    }
    if (!p.bs.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite belief state");
  }
  if (pairs_.empty()) return;
  PointMatrix points(static_cast<Eigen::Index>(pairs_.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = prepare(pairs_[i].bs).transpose();
  }
  tree_.emplace(std::move(points), leaf_size_);
}

Vector StateActionStore::prepare(const Vector& v) const {
  if (metric_ == Metric::kCosine) {
    const double n = v.norm();
    return n > 0.0 ? Vector(v / n) : v;
  }
  return v;
}

StateActionStore::Match StateActionStore::nearest(const Vector& query) const {
  if (!tree_) throw Error(ErrorCode::kEmptyStore, "state-action store is empty");
  if (static_cast<std::size_t>(query.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query dimension " + std::to_string(query.size()) + " does not match " +
                    to_string(mode_) + " store dimension " + std::to_string(dim_));
  }
  const Vector q = prepare(query);
  const auto nb = tree_->nearest(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
  return {nb.index, nb.distance, &pairs_[nb.index]};
}

void StateActionStore::save(std::ostream& out) const {
  out.write(kMagic, 4);
  io::write_pod<std::uint32_t>(out, kStoreVersion);
  io::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(mode_));
  io::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(metric_));
  io::write_pod<std::uint16_t>(out, 0);
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  io::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(pairs_.size()));
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(leaf_size_));
  for (const auto& p : pairs_) {
    for (Eigen::Index k = 0; k < p.bs.size(); ++k) io::write_pod<double>(out, p.bs[k]);
    io::write_string(out, p.action.text());
    io::write_string(out, p.dialog_id);
    io::write_pod<std::uint32_t>(out, p.turn);
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing store snapshot");
}

void StateActionStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write store: " + path);
  save(out);
}

StateActionStore StateActionStore::load(std::istream& in) {
  io::expect_magic(in, kMagic);
  const auto version = io::read_pod<std::uint32_t>(in, "version");
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kFormat, "unsupported store version " + std::to_string(version));
  }
  const auto mode = io::read_pod<std::uint8_t>(in, "mode");
  const auto metric = io::read_pod<std::uint8_t>(in, "metric");
  if (mode > 2 || metric > 1) throw Error(ErrorCode::kFormat, "bad mode or metric in store header");
  io::read_pod<std::uint16_t>(in, "reserved");
  const auto dim = io::read_pod<std::uint32_t>(in, "dimension");
  const auto count = io::read_pod<std::uint64_t>(in, "pair count");
  const auto leaf_size = io::read_pod<std::uint32_t>(in, "leaf size");
  std::vector<StateActionPair> pairs;
  pairs.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    StateActionPair p;
    p.bs.resize(dim);
    for (std::uint32_t k = 0; k < dim; ++k) p.bs[k] = io::read_pod<double>(in, "belief vector");
    p.action = corpus::Utterance::from_text(io::read_string(in, "action"));
    p.dialog_id = io::read_string(in, "dialog id");
    p.turn = io::read_pod<std::uint32_t>(in, "turn");
    pairs.push_back(std::move(p));
  }
  return StateActionStore(static_cast<BeliefMode>(mode), dim, std::move(pairs), leaf_size,
                          static_cast<Metric>(metric));
}

StateActionStore StateActionStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open store: " + path);
  return load(in);
}

// ---------------------------------------------------------------------------

StateActionStore extract_store(const seq2seq::Model& model, BeliefMode mode,
                               const std::vector<corpus::Dialog>& train_dialogs,
                               std::size_t leaf_size, Metric metric) {
  std::vector<StateActionPair> pairs;
  pairs.reserve(corpus::count_turns(train_dialogs));
  for (const auto& dialog : train_dialogs) {
    const auto encoded = seq2seq::encode_dialog(dialog, model.vocab);
    const auto fwd = seq2seq::forward_dialog(model.params, model.config, encoded);
    for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
      pairs.push_back({belief_vector(mode, fwd.states[t]), dialog.turns[t].agent, dialog.id,
                       dialog.turns[t].index});
    }
  }
  return StateActionStore(mode, belief_dim(mode, model.config.hidden_dim), std::move(pairs),
                          leaf_size, metric);
}

QueryState query_state(const seq2seq::Model& model, BeliefMode mode,
                       const seq2seq::EncoderOutput& enc) {
  QueryState q;
  if (mode == BeliefMode::kEncoderFinal) {
    q.decode.state.encoder_final = enc.h;
    q.bs = enc.h;
    return q;
  }
  q.decode = seq2seq::decode_from_encoder(model.params, model.config, enc);
  q.bs = belief_vector(mode, q.decode.state);
  return q;
}

NnPrediction nnb_predict(const seq2seq::Model& model, const StateActionStore& store,
                         const std::vector<corpus::Utterance>& user_history,
                         const std::vector<corpus::Utterance>& agent_history) {
  if (user_history.empty()) throw Error(ErrorCode::kInvalidArgument, "history has no user turn");
  if (agent_history.size() + 1 != user_history.size()) {
    throw Error(ErrorCode::kInvalidArgument, "history must hold t user and t-1 agent turns");
  }
  if (store.size() == 0) throw Error(ErrorCode::kEmptyStore, "state-action store is empty");
  seq2seq::HistoryEncoder history(model.params, model.config);
  seq2seq::EncoderOutput enc;
  for (const auto& u : user_history) enc = history.step(model.vocab.encode(u));
  const QueryState q = query_state(model, store.mode(), enc);
  const auto match = store.nearest(q.bs);
  return {match.pair->action, match};
}

}  // namespace dialogforge::belief
