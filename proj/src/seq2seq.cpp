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

#include "dialogforge/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dialogforge/errors.hpp"
#include "dialogforge/rng.hpp"

namespace dialogforge::seq2seq {

using corpus::kBos;
using corpus::kEos;
using corpus::kPad;
using corpus::kSilenceId;
using corpus::kUnk;

void ModelConfig::validate() const {
  if (embed_dim < 1 || hidden_dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "embed_dim and hidden_dim must be >= 1");
  }
  if (max_decode_len < 2) throw Error(ErrorCode::kInvalidArgument, "max_decode_len must be >= 2");
}

void TrainConfig::validate() const {
  if (epochs < 1 || batch_size < 1 || threads < 1) {
    throw Error(ErrorCode::kInvalidArgument, "epochs, batch_size and threads must be positive");
  }
  if (!(learning_rate >= 0.0) || !(gradient_clip_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning_rate must be non-negative and gradient_clip_norm positive");
  }
}

// ---------------------------------------------------------------------------
// Parameters

Seq2SeqParams Seq2SeqParams::zeros(const ModelConfig& config, std::size_t vocab_size) {
  config.validate();
  const auto V = static_cast<Eigen::Index>(vocab_size);
  const Eigen::Index E = config.embed_dim;
  const Eigen::Index H = config.hidden_dim;
  Seq2SeqParams p;
  p.embedding = RowMatrix::Zero(V, E);
  p.encoder.W = Matrix::Zero(4 * H, config.encoder_input_dim());
  p.encoder.U = Matrix::Zero(4 * H, H);
  p.encoder.b = Vector::Zero(4 * H);
  p.decoder.W = Matrix::Zero(4 * H, E);
  p.decoder.U = Matrix::Zero(4 * H, H);
  p.decoder.b = Vector::Zero(4 * H);
  p.output_w = Matrix::Zero(V, H);
  p.output_b = Vector::Zero(V);
  return p;
}

Seq2SeqParams Seq2SeqParams::initialize(const ModelConfig& config, std::size_t vocab_size,
                                        std::int64_t seed) {
  Seq2SeqParams p = zeros(config, vocab_size);
  Rng rng(seed);
  const double scale = 0.08;
  p.for_each([&](std::string_view name, auto& t) {
    if (name.ends_with(".b")) return;
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform_real(-scale, scale);
  });
  const Eigen::Index H = config.hidden_dim;
  p.encoder.b.segment(H, H).setOnes();
  p.decoder.b.segment(H, H).setOnes();
  return p;
}

std::size_t Seq2SeqParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

bool Seq2SeqParams::all_finite() const {
  bool ok = true;
  for_each([&](std::string_view, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

void Seq2SeqParams::set_zero() {
  for_each([](std::string_view, auto& t) { t.setZero(); });
}

void Seq2SeqParams::add_scaled(const Seq2SeqParams& other, double scale) {
  embedding += scale * other.embedding;
  encoder.W += scale * other.encoder.W;
  encoder.U += scale * other.encoder.U;
  encoder.b += scale * other.encoder.b;
  decoder.W += scale * other.decoder.W;
  decoder.U += scale * other.decoder.U;
  decoder.b += scale * other.decoder.b;
  output_w += scale * other.output_w;
  output_b += scale * other.output_b;
}

double Seq2SeqParams::squared_norm() const {
  double s = 0.0;
  for_each([&](std::string_view, const auto& t) { s += t.squaredNorm(); });
  return s;
}

// ---------------------------------------------------------------------------
// Encoding

EncodedDialog encode_dialog(const corpus::Dialog& dialog, const corpus::Vocabulary& vocab) {
  EncodedDialog out;
  out.id = dialog.id;
  out.turns.reserve(dialog.turns.size());
  for (const auto& t : dialog.turns) {
    out.turns.push_back({vocab.encode(t.user), vocab.encode(t.agent)});
  }
  return out;
}

std::vector<EncodedDialog> encode_dialogs(const std::vector<corpus::Dialog>& dialogs,
                                          const corpus::Vocabulary& vocab) {
  std::vector<EncodedDialog> out;
  out.reserve(dialogs.size());
  for (const auto& d : dialogs) out.push_back(encode_dialog(d, vocab));
  return out;
}

TokenIds decoder_targets(const TokenIds& agent) {
  TokenIds t = agent;
  t.push_back(kEos);
  return t;
}

// ---------------------------------------------------------------------------
// LSTM kernels

namespace {

struct LstmTrace {
  Matrix x;       // input x n
  Matrix gates;   // 4H x n, post-activation
  Matrix h;       // H x (n+1); column 0 is the initial state
  Matrix c;       // H x (n+1)
  Matrix tanh_c;  // H x n
};

inline void sigmoid_inplace(Eigen::Ref<Vector> v) {
  v = (1.0 + (-v.array()).exp()).inverse().matrix();
}

void lstm_step(const LstmWeights& w, const Eigen::Ref<const Vector>& z_in, LstmTrace& tr,
               Eigen::Index t) {
  const Eigen::Index H = w.U.cols();
  Vector z = z_in + w.U * tr.h.col(t);
  sigmoid_inplace(z.segment(0, 2 * H));
  z.segment(2 * H, H) = z.segment(2 * H, H).array().tanh().matrix();
  sigmoid_inplace(z.segment(3 * H, H));
  tr.c.col(t + 1) = z.segment(H, H).cwiseProduct(tr.c.col(t)) +
                    z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
  tr.tanh_c.col(t) = tr.c.col(t + 1).array().tanh().matrix();
  tr.h.col(t + 1) = z.segment(3 * H, H).cwiseProduct(tr.tanh_c.col(t));
  tr.gates.col(t) = z;
}

void lstm_forward(const LstmWeights& w, Matrix x, const Vector& h0, const Vector& c0,
                  LstmTrace& tr) {
  const Eigen::Index H = w.U.cols();
  const Eigen::Index n = x.cols();
  Matrix z_in = w.W * x;
  z_in.colwise() += w.b;
  tr.x = std::move(x);
  tr.gates.resize(4 * H, n);
  tr.h.resize(H, n + 1);
  tr.c.resize(H, n + 1);
  tr.tanh_c.resize(H, n);
  tr.h.col(0) = h0;
  tr.c.col(0) = c0;
  for (Eigen::Index t = 0; t < n; ++t) lstm_step(w, z_in.col(t), tr, t);
}

// Accumulates weight gradients into `grad`; returns input gradients in dx and
// initial-state gradients in dh / dc (which carry the final-state gradients
// on entry).
void lstm_backward(const LstmWeights& w, const LstmTrace& tr, const Matrix* dh_out,
                   LstmWeights& grad, Matrix& dx, Vector& dh, Vector& dc) {
  const Eigen::Index H = w.U.cols();
  const Eigen::Index n = tr.x.cols();
  Matrix dz(4 * H, n);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    if (dh_out != nullptr) dh += dh_out->col(t);
    const auto i = tr.gates.col(t).segment(0, H).array();
    const auto f = tr.gates.col(t).segment(H, H).array();
    const auto g = tr.gates.col(t).segment(2 * H, H).array();
    const auto o = tr.gates.col(t).segment(3 * H, H).array();
    const auto tc = tr.tanh_c.col(t).array();

    dc.array() += dh.array() * o * (1.0 - tc.square());
    dz.col(t).segment(0, H) = (dc.array() * g * i * (1.0 - i)).matrix();
    dz.col(t).segment(H, H) = (dc.array() * tr.c.col(t).array() * f * (1.0 - f)).matrix();
    dz.col(t).segment(2 * H, H) = (dc.array() * i * (1.0 - g.square())).matrix();
    dz.col(t).segment(3 * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();

    dc = (dc.array() * f).matrix();
    dh.noalias() = w.U.transpose() * dz.col(t);
  }
  grad.W.noalias() += dz * tr.x.transpose();
  grad.U.noalias() += dz * tr.h.leftCols(n).transpose();
  grad.b += dz.rowwise().sum();
  dx.noalias() = w.W.transpose() * dz;
}

void softmax_columns(Matrix& logits) {
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    auto col = logits.col(j);
    const double m = col.maxCoeff();
    col = (col.array() - m).exp().matrix();
    col /= col.sum();
  }
}

void check_ids(const TokenIds& ids, std::size_t vocab_size) {
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw Error(ErrorCode::kShapeMismatch, "token id " + std::to_string(id) +
                                                 " outside vocabulary of size " +
                                                 std::to_string(vocab_size));
    }
  }
}

Matrix encoder_inputs(const Seq2SeqParams& params, const ModelConfig& config,
                      const TokenIds& user, const Vector* context) {
  const Eigen::Index E = config.embed_dim;
  const Eigen::Index n = static_cast<Eigen::Index>(user.size());
  Matrix x(config.encoder_input_dim(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x.col(k).head(E) = params.embedding.row(user[static_cast<std::size_t>(k)]).transpose();
  }
  if (config.use_context) {
    if (context != nullptr) {
      x.bottomRows(config.hidden_dim).colwise() = *context;
    } else {
      x.bottomRows(config.hidden_dim).setZero();
    }
  }
  return x;
}

Matrix decoder_inputs(const Seq2SeqParams& params, const TokenIds& agent) {
  const Eigen::Index E = params.embedding.cols();
  Matrix x(E, static_cast<Eigen::Index>(agent.size() + 1));
  x.col(0) = params.embedding.row(kBos).transpose();
  for (std::size_t k = 0; k < agent.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k + 1)) = params.embedding.row(agent[k]).transpose();
  }
  return x;
}

void check_context(const ModelConfig& config, const Vector* context) {
  if (context == nullptr) return;
  if (!config.use_context) {
    throw Error(ErrorCode::kShapeMismatch,
                "model has no context input (use_context=false) but a context was supplied");
  }
  if (context->size() != config.hidden_dim) {
    throw Error(ErrorCode::kShapeMismatch, "context dimension " + std::to_string(context->size()) +
                                               " != hidden_dim " +
                                               std::to_string(config.hidden_dim));
  }
}

struct TurnTrace {
  LstmTrace enc;
  LstmTrace dec;
  Matrix probs;  // vocab x steps
  TokenIds targets;
};

// Teacher-forced forward pass over one dialog, keeping everything needed for
// backpropagation.
void forward_traces(const Seq2SeqParams& params, const ModelConfig& config,
                    const EncodedDialog& dialog, std::vector<TurnTrace>& traces) {
  const Eigen::Index H = config.hidden_dim;
  const Vector zero = Vector::Zero(H);
  traces.resize(dialog.turns.size());
  for (std::size_t t = 0; t < dialog.turns.size(); ++t) {
    const auto& turn = dialog.turns[t];
    if (turn.user.empty()) throw Error(ErrorCode::kInvalidArgument, "empty user turn");
    check_ids(turn.user, params.vocab_size());
    check_ids(turn.agent, params.vocab_size());
    TurnTrace& tr = traces[t];
    Vector context;
    const Vector* ctx = nullptr;
    if (config.use_context && t > 0) {
      context = traces[t - 1].enc.h.rightCols(1);
      ctx = &context;
    }
    lstm_forward(params.encoder, encoder_inputs(params, config, turn.user, ctx), zero, zero, tr.enc);
    lstm_forward(params.decoder, decoder_inputs(params, turn.agent), tr.enc.h.rightCols(1),
                 tr.enc.c.rightCols(1), tr.dec);
    tr.probs = params.output_w * tr.dec.h.rightCols(tr.dec.h.cols() - 1);
    tr.probs.colwise() += params.output_b;
    softmax_columns(tr.probs);
    tr.targets = decoder_targets(turn.agent);
  }
}

// Sum of target NLL over one dialog; adds scale * d(sum NLL)/d(params) into grads.
double dialog_gradient(const Seq2SeqParams& params, const ModelConfig& config,
                       const EncodedDialog& dialog, double scale, Seq2SeqParams& grads,
                       std::vector<TurnTrace>& traces) {
  forward_traces(params, config, dialog, traces);
  const Eigen::Index E = config.embed_dim;
  const Eigen::Index H = config.hidden_dim;

  double nll = 0.0;
  Vector d_context = Vector::Zero(H);  // gradient flowing into encoder final h from turn t+1
  Matrix dx;
  for (std::size_t ti = dialog.turns.size(); ti-- > 0;) {
    TurnTrace& tr = traces[ti];
    Matrix d_logits = tr.probs;
    for (std::size_t k = 0; k < tr.targets.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const auto y = tr.targets[k];
      if (y == kPad) {
        d_logits.col(col).setZero();
        continue;
      }
      nll -= std::log(tr.probs(y, col));
      d_logits(y, col) -= 1.0;
    }
    d_logits *= scale;

    const auto steps = tr.dec.h.cols() - 1;
    grads.output_w.noalias() += d_logits * tr.dec.h.rightCols(steps).transpose();
    grads.output_b += d_logits.rowwise().sum();
    const Matrix dh_dec = params.output_w.transpose() * d_logits;

    Vector dh = Vector::Zero(H);
    Vector dc = Vector::Zero(H);
    lstm_backward(params.decoder, tr.dec, &dh_dec, grads.decoder, dx, dh, dc);
    const auto& agent = dialog.turns[ti].agent;
    grads.embedding.row(kBos) += dx.col(0).transpose();
    for (std::size_t k = 0; k < agent.size(); ++k) {
      grads.embedding.row(agent[k]) += dx.col(static_cast<Eigen::Index>(k + 1)).transpose();
    }

    // dh/dc now hold the gradient w.r.t. the decoder's initial state, which
    // is the encoder's final state; add the context path from turn t+1.
    dh += d_context;
    lstm_backward(params.encoder, tr.enc, nullptr, grads.encoder, dx, dh, dc);
    const auto& user = dialog.turns[ti].user;
    for (std::size_t k = 0; k < user.size(); ++k) {
      grads.embedding.row(user[k]) += dx.col(static_cast<Eigen::Index>(k)).head(E).transpose();
    }
    if (config.use_context) {
      d_context = dx.bottomRows(H).rowwise().sum();
    }
  }
  return nll;
}

std::size_t count_targets(std::span<const EncodedDialog> batch) {
  std::size_t n = 0;
  for (const auto& d : batch) {
    for (const auto& t : d.turns) {
      n += 1 + static_cast<std::size_t>(std::count_if(t.agent.begin(), t.agent.end(),
                                                      [](auto id) { return id != kPad; }));
    }
  }
  return n;
}

std::int32_t argmax_lowest(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<std::int32_t>(best);
}

}  // namespace

// ---------------------------------------------------------------------------

EncoderOutput encode_turn(const Seq2SeqParams& params, const ModelConfig& config,
                          const TokenIds& user_tokens, const Vector* prev_context) {
  check_context(config, prev_context);
  if (user_tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "empty user utterance");
  check_ids(user_tokens, params.vocab_size());
  const Vector zero = Vector::Zero(config.hidden_dim);
  LstmTrace tr;
  lstm_forward(params.encoder, encoder_inputs(params, config, user_tokens, prev_context), zero,
               zero, tr);
  return {tr.h.rightCols(1), tr.c.rightCols(1)};
}

DialogForward forward_dialog(const Seq2SeqParams& params, const ModelConfig& config,
                             const EncodedDialog& dialog) {
  std::vector<TurnTrace> traces;
  forward_traces(params, config, dialog, traces);
  DialogForward out;
  for (auto& tr : traces) {
    out.distributions.push_back(std::move(tr.probs));
    out.states.push_back({tr.enc.h.rightCols(1), tr.dec.h.rightCols(1), false});
  }
  return out;
}

double loss(std::span<const Matrix> distributions, std::span<const TokenIds> targets) {
  if (distributions.size() != targets.size()) {
    throw Error(ErrorCode::kShapeMismatch, "distribution and target counts differ");
  }
  double nll = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (static_cast<std::size_t>(distributions[t].cols()) != targets[t].size()) {
      throw Error(ErrorCode::kShapeMismatch, "target length does not match distribution steps");
    }
    for (std::size_t k = 0; k < targets[t].size(); ++k) {
      const auto y = targets[t][k];
      if (y == kPad) continue;
      nll -= std::log(distributions[t](y, static_cast<Eigen::Index>(k)));
      ++n;
    }
  }
  return n == 0 ? 0.0 : nll / static_cast<double>(n);
}

double batch_loss(const Seq2SeqParams& params, const ModelConfig& config,
                  std::span<const EncodedDialog> batch) {
  double nll = 0.0;
  std::size_t n = 0;
  std::vector<TurnTrace> traces;
  for (const auto& d : batch) {
    forward_traces(params, config, d, traces);
    for (const auto& tr : traces) {
      for (std::size_t k = 0; k < tr.targets.size(); ++k) {
        if (tr.targets[k] == kPad) continue;
        nll -= std::log(tr.probs(tr.targets[k], static_cast<Eigen::Index>(k)));
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : nll / static_cast<double>(n);
}

double clip_global_norm(Seq2SeqParams& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    grads.for_each([&](std::string_view, auto& t) { t *= s; });
    return std::sqrt(grads.squared_norm());
  }
  return norm;
}

BackwardResult backward(const Seq2SeqParams& params, const ModelConfig& config,
                        std::span<const EncodedDialog> batch, Seq2SeqParams& grads,
                        double clip_norm, unsigned threads) {
  BackwardResult result;
  result.tokens = count_targets(batch);
  grads = Seq2SeqParams::zeros(config, params.vocab_size());
  if (result.tokens == 0) return result;
  const double scale = 1.0 / static_cast<double>(result.tokens);

  const std::size_t n = batch.size();
  std::vector<Seq2SeqParams> partial(n);
  std::vector<double> nll(n, 0.0);
  std::vector<std::exception_ptr> errors(n);

  auto work = [&](std::size_t worker, std::size_t stride) {
    std::vector<TurnTrace> traces;
    for (std::size_t i = worker; i < n; i += stride) {
      try {
        partial[i] = Seq2SeqParams::zeros(config, params.vocab_size());
        nll[i] = dialog_gradient(params, config, batch[i], scale, partial[i], traces);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    grads.add_scaled(partial[i], 1.0);
    total += nll[i];
  }
  result.loss = total * scale;
  result.raw_norm = std::sqrt(grads.squared_norm());
  result.norm = clip_norm > 0.0 ? clip_global_norm(grads, clip_norm) : result.raw_norm;
  return result;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Adam {
  Seq2SeqParams m;
  Seq2SeqParams v;
  std::int64_t step = 0;
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  void update(Seq2SeqParams& params, Seq2SeqParams& grads, double lr) {
    ++step;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    std::vector<double*> p_data, g_data, m_data, v_data;
    std::vector<Eigen::Index> sizes;
    params.for_each([&](std::string_view, auto& t) { p_data.push_back(t.data()); sizes.push_back(t.size()); });
    grads.for_each([&](std::string_view, auto& t) { g_data.push_back(t.data()); });
    m.for_each([&](std::string_view, auto& t) { m_data.push_back(t.data()); });
    v.for_each([&](std::string_view, auto& t) { v_data.push_back(t.data()); });
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      Eigen::Map<Eigen::ArrayXd> p(p_data[k], sizes[k]), g(g_data[k], sizes[k]),
          mm(m_data[k], sizes[k]), vv(v_data[k], sizes[k]);
      mm = kBeta1 * mm + (1.0 - kBeta1) * g;
      vv = kBeta2 * vv + (1.0 - kBeta2) * g.square();
      p -= lr * (mm / c1) / ((vv / c2).sqrt() + kEps);
    }
  }
};

double checked(double loss_value, int epoch) {
  if (!std::isfinite(loss_value)) {
    throw Error(ErrorCode::kDiverged, "loss became non-finite in epoch " + std::to_string(epoch));
  }
  return loss_value;
}

}  // namespace

TrainResult train(const Seq2SeqParams& init, const ModelConfig& config,
                  const TrainConfig& train_config, std::span<const EncodedDialog> train_set,
                  std::span<const EncodedDialog> validation_set) {
  config.validate();
  train_config.validate();
  if (train_set.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training split");

  TrainResult result;
  Seq2SeqParams params = init;
  Adam adam{Seq2SeqParams::zeros(config, init.vocab_size()),
            Seq2SeqParams::zeros(config, init.vocab_size())};
  Rng rng(Rng::derive(train_config.seed, 1));
  const bool has_val = !validation_set.empty();

  auto selection_loss = [&](const EpochLoss& e) { return has_val ? e.val_loss : e.train_loss; };

  EpochLoss initial;
  initial.train_loss = checked(batch_loss(params, config, train_set), 0);
  initial.val_loss = has_val ? checked(batch_loss(params, config, validation_set), 0) : initial.train_loss;
  initial.best_val_loss = selection_loss(initial);
  result.history.push_back(initial);
  result.params = params;
  double best = initial.best_val_loss;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Seq2SeqParams grads;
  std::vector<EncodedDialog> batch;

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(train_config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(train_config.batch_size));
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
      const auto r = backward(params, config, batch, grads, train_config.gradient_clip_norm,
                              train_config.threads);
      checked(r.loss, epoch);
      epoch_nll += r.loss * static_cast<double>(r.tokens);
      epoch_tokens += r.tokens;
      adam.update(params, grads, train_config.learning_rate);
    }
    EpochLoss e;
    e.epoch = epoch;
    e.train_loss = checked(epoch_nll / static_cast<double>(std::max<std::size_t>(1, epoch_tokens)), epoch);
    e.val_loss = has_val ? checked(batch_loss(params, config, validation_set), epoch) : e.train_loss;
    if (selection_loss(e) < best) {
      best = selection_loss(e);
      result.params = params;
      result.best_epoch = epoch;
    }
    e.best_val_loss = best;
    result.history.push_back(e);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Decoding

GreedyDecode decode_from_encoder(const Seq2SeqParams& params, const ModelConfig& config,
                                 const EncoderOutput& enc) {
  GreedyDecode out;
  const Eigen::Index H = config.hidden_dim;
  LstmTrace tr;
  tr.h.resize(H, 2);
  tr.c.resize(H, 2);
  tr.gates.resize(4 * H, 1);
  tr.tanh_c.resize(H, 1);
  Vector h = enc.h;
  Vector c = enc.c;
  std::int32_t input = kBos;
  bool finished = false;
  int emitted = 0;
  while (true) {
    tr.h.col(0) = h;
    tr.c.col(0) = c;
    const Vector z_in = params.decoder.W * params.embedding.row(input).transpose() + params.decoder.b;
    lstm_step(params.decoder, z_in, tr, 0);
    h = tr.h.col(1);
    c = tr.c.col(1);
    const Vector logits = params.output_w * h + params.output_b;
    const std::int32_t next = argmax_lowest(logits);
    if (next == kEos) {
      finished = true;
      break;
    }
    if (emitted == config.max_decode_len) break;
    ++emitted;
    if (next != kPad && next != kBos && next != kUnk) out.tokens.push_back(next);
    input = next;
  }
  out.state.encoder_final = enc.h;
  out.state.decoder_final = h;
  out.state.truncated = !finished;
  return out;
}

GreedyDecode decode_greedy(const Seq2SeqParams& params, const ModelConfig& config,
                           const TokenIds& user_tokens, const Vector* prev_context) {
  return decode_from_encoder(params, config, encode_turn(params, config, user_tokens, prev_context));
}

Vector teacher_forced_decoder_final(const Seq2SeqParams& params, const ModelConfig& config,
                                    const EncoderOutput& enc, const TokenIds& agent) {
  (void)config;
  check_ids(agent, params.vocab_size());
  LstmTrace tr;
  lstm_forward(params.decoder, decoder_inputs(params, agent), enc.h, enc.c, tr);
  return tr.h.rightCols(1);
}

corpus::Utterance to_utterance(const TokenIds& ids, const corpus::Vocabulary& vocab) {
  if (ids.empty()) return corpus::Utterance::silence();
  return corpus::Utterance(vocab.decode(ids));
}

EncoderOutput HistoryEncoder::step(const TokenIds& user_tokens) {
  const Vector* ctx = config_->use_context ? context() : nullptr;
  EncoderOutput out = encode_turn(*params_, *config_, user_tokens, ctx);
  if (config_->use_context) context_ = out.h;
  ++turn_;
  return out;
}

}  // namespace dialogforge::seq2seq
