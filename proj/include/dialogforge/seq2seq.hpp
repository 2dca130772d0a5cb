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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dialogforge/corpus.hpp"

namespace dialogforge::seq2seq {

using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using TokenIds = std::vector<std::int32_t>;

enum class ContextSource : std::uint8_t { kEncoderFinal = 0 };

struct ModelConfig {
  int embed_dim = 64;
  int hidden_dim = 128;
  int max_decode_len = 32;
  bool use_context = true;  // false: Model 1 (turns independent); true: Model 2 (HRED)
  ContextSource context_source = ContextSource::kEncoderFinal;

  int encoder_input_dim() const { return embed_dim + (use_context ? hidden_dim : 0); }
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double gradient_clip_norm = 5.0;
  std::int64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

/// Gates are stacked [input; forget; cell; output], each hidden_dim rows.
struct LstmWeights {
  Matrix W;  // 4H x input
  Matrix U;  // 4H x H
  Vector b;  // 4H
};

/// Every learnable array. One instance serves all unrolled turn copies.
struct Seq2SeqParams {
  RowMatrix embedding;  // vocab x embed; row per token
  LstmWeights encoder;
  LstmWeights decoder;
  Matrix output_w;  // vocab x H
  Vector output_b;  // vocab

  static Seq2SeqParams zeros(const ModelConfig& config, std::size_t vocab_size);
  /// Uniform(-0.08, 0.08) weights, zero biases except forget gates at 1.
  static Seq2SeqParams initialize(const ModelConfig& config, std::size_t vocab_size,
                                  std::int64_t seed);

  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding.rows()); }
  std::size_t parameter_count() const;
  bool all_finite() const;
  void set_zero();
  void add_scaled(const Seq2SeqParams& other, double scale);
  double squared_norm() const;

  /// Visits (name, tensor) pairs in checkpoint order.
  template <typename F>
  void for_each(F&& f) {
    f(std::string_view("embedding"), embedding);
    f(std::string_view("encoder.W"), encoder.W);
    f(std::string_view("encoder.U"), encoder.U);
    f(std::string_view("encoder.b"), encoder.b);
    f(std::string_view("decoder.W"), decoder.W);
    f(std::string_view("decoder.U"), decoder.U);
    f(std::string_view("decoder.b"), decoder.b);
    f(std::string_view("output.W"), output_w);
    f(std::string_view("output.b"), output_b);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<Seq2SeqParams*>(this)->for_each(
        [&](std::string_view name, const auto& t) { f(name, t); });
  }
};

// ---------------------------------------------------------------------------

struct EncodedTurn {
  TokenIds user;
  TokenIds agent;  // without <BOS>/<EOS>
};

struct EncodedDialog {
  std::string id;
  std::vector<EncodedTurn> turns;
};

EncodedDialog encode_dialog(const corpus::Dialog& dialog, const corpus::Vocabulary& vocab);
std::vector<EncodedDialog> encode_dialogs(const std::vector<corpus::Dialog>& dialogs,
                                          const corpus::Vocabulary& vocab);

/// Agent ids followed by <EOS>.
TokenIds decoder_targets(const TokenIds& agent);

struct TurnState {
  Vector encoder_final;
  Vector decoder_final;
  bool truncated = false;  // greedy decode hit max_decode_len before <EOS>
};

/// Final encoder hidden and cell states for one user utterance.
struct EncoderOutput {
  Vector h;
  Vector c;
};

/// Runs the encoder over [embedding(token) ; context] per step. `prev_context`
/// must be null for use_context=false models; for context models a null
/// pointer stands for the zero vector of turn 1. Throws ShapeMismatch.
EncoderOutput encode_turn(const Seq2SeqParams& params, const ModelConfig& config,
                          const TokenIds& user_tokens, const Vector* prev_context);

struct DialogForward {
  std::vector<Matrix> distributions;  // per turn: vocab x (len(agent)+1), columns sum to 1
  std::vector<TurnState> states;
};

/// Teacher-forced forward pass over all turns with context threading.
DialogForward forward_dialog(const Seq2SeqParams& params, const ModelConfig& config,
                             const EncodedDialog& dialog);

/// Mean negative log probability of the targets; <PAD> targets are skipped.
double loss(std::span<const Matrix> distributions, std::span<const TokenIds> targets);

/// Mean token loss over a batch via forward passes only.
double batch_loss(const Seq2SeqParams& params, const ModelConfig& config,
                  std::span<const EncodedDialog> batch);

struct BackwardResult {
  double loss = 0.0;        // mean token NLL over the batch
  std::size_t tokens = 0;   // scored target positions
  double raw_norm = 0.0;    // global gradient norm before clipping
  double norm = 0.0;        // after clipping
};

/// Exact gradients of the batch mean loss by backpropagation through time,
/// including the cross-turn context links. `grads` is overwritten. When
/// clip_norm > 0 the global norm is clipped to it afterwards. Per-dialog
/// gradients are reduced in batch order, so the result does not depend on
/// `threads`.
BackwardResult backward(const Seq2SeqParams& params, const ModelConfig& config,
                        std::span<const EncodedDialog> batch, Seq2SeqParams& grads,
                        double clip_norm, unsigned threads = 1);

/// Rescales so the global L2 norm is at most max_norm. Returns the new norm.
double clip_global_norm(Seq2SeqParams& grads, double max_norm);

// ---------------------------------------------------------------------------

struct EpochLoss {
  int epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  double val_loss = 0.0;
  double best_val_loss = 0.0;
};

struct TrainResult {
  Seq2SeqParams params;
  std::vector<EpochLoss> history;
  int best_epoch = 0;
};

/// Adam over shuffled mini-batches; returns the parameters of the epoch with
/// the lowest validation loss (train loss when there is no validation set).
/// Throws Diverged on a non-finite loss.
TrainResult train(const Seq2SeqParams& init, const ModelConfig& config,
                  const TrainConfig& train_config, std::span<const EncodedDialog> train_set,
                  std::span<const EncodedDialog> validation_set);

// ---------------------------------------------------------------------------

struct GreedyDecode {
  TokenIds tokens;  // surface ids, specials other than <SILENCE> stripped
  TurnState state;
};

/// Argmax decoding from <BOS> until <EOS> or max_decode_len tokens. Ties go
/// to the lowest token id.
GreedyDecode decode_greedy(const Seq2SeqParams& params, const ModelConfig& config,
                           const TokenIds& user_tokens, const Vector* prev_context);

/// Greedy decoding from an already computed encoder state.
GreedyDecode decode_from_encoder(const Seq2SeqParams& params, const ModelConfig& config,
                                 const EncoderOutput& enc);

/// Decoder final hidden after teacher-forcing `agent` from the encoder state.
Vector teacher_forced_decoder_final(const Seq2SeqParams& params, const ModelConfig& config,
                                    const EncoderOutput& enc, const TokenIds& agent);

/// Surface utterance for decoded ids; an empty decode becomes <SILENCE>.
corpus::Utterance to_utterance(const TokenIds& ids, const corpus::Vocabulary& vocab);

/// Threads the encoder context across the user turns of one dialog. Batch
/// evaluation and the interactive session both go through this type.
class HistoryEncoder {
 public:
  HistoryEncoder(const Seq2SeqParams& params, const ModelConfig& config)
      : params_(&params), config_(&config) {}

  /// Encodes the next user utterance and advances the context.
  EncoderOutput step(const TokenIds& user_tokens);
  void reset() { context_.reset(); turn_ = 0; }
  std::size_t turns_seen() const { return turn_; }
  /// Context fed to the next step (encoder final of the previous turn), or null.
  const Vector* context() const { return context_ ? &*context_ : nullptr; }

 private:
  const Seq2SeqParams* params_;
  const ModelConfig* config_;
  std::optional<Vector> context_;
  std::size_t turn_ = 0;
};

}  // namespace dialogforge::seq2seq
