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

#include "dialogforge/checkpoint.hpp"

#include <fstream>
#include <map>
#include <vector>

#include "binary_io.hpp"
#include "dialogforge/errors.hpp"

namespace dialogforge::seq2seq {

namespace {

constexpr char kMagic[5] = "S2SD";

template <typename T>
void write_tensor(std::ostream& out, std::string_view name, const T& t) {
  io::write_string(out, std::string(name));
  const bool vector = T::ColsAtCompileTime == 1;
  io::write_pod<std::uint32_t>(out, vector ? 1 : 2);
  io::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t.rows()));
  if (!vector) io::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(t.cols()));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) io::write_pod<double>(out, t(r, c));
  }
}

template <typename T>
void read_tensor(std::istream& in, std::string_view expected, T& t) {
  const std::string name = io::read_string(in, "tensor name");
  if (name != expected) {
    throw Error(ErrorCode::kFormat, "expected tensor " + std::string(expected) + ", found " + name);
  }
  const auto rank = io::read_pod<std::uint32_t>(in, "tensor rank");
  const bool vector = T::ColsAtCompileTime == 1;
  if (rank != (vector ? 1u : 2u)) throw Error(ErrorCode::kFormat, "bad rank for " + name);
  const auto rows = io::read_pod<std::uint64_t>(in, "tensor shape");
  const std::uint64_t cols = vector ? 1 : io::read_pod<std::uint64_t>(in, "tensor shape");
  if (rows != static_cast<std::uint64_t>(t.rows()) || cols != static_cast<std::uint64_t>(t.cols())) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor " + name + " has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                    ", config implies " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
  }
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = io::read_pod<double>(in, "tensor data");
  }
}

}  // namespace

void save_checkpoint(const Model& model, std::ostream& out) {
  out.write(kMagic, 4);
  io::write_pod<std::uint32_t>(out, kCheckpointVersion);

  const auto& cfg = model.config;
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.embed_dim));
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.hidden_dim));
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.max_decode_len));
  io::write_pod<std::uint8_t>(out, cfg.use_context ? 1 : 0);
  io::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.context_source));
  io::write_pod<std::uint16_t>(out, 0);
  io::write_pod<std::int64_t>(out, model.split_seed);
  io::write_pod<std::uint32_t>(out, model.min_count);

  const auto& tokens = model.vocab.tokens();
  io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tokens.size()));
  for (const auto& t : tokens) io::write_string(out, t);

  io::write_pod<std::uint32_t>(out, 9);
  model.params.for_each([&](std::string_view name, const auto& t) { write_tensor(out, name, t); });
  if (!out) throw Error(ErrorCode::kIo, "failed writing checkpoint");
}

Model load_checkpoint(std::istream& in) {
  io::expect_magic(in, kMagic);
  const auto version = io::read_pod<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
  }
  Model model;
  auto& cfg = model.config;
  cfg.embed_dim = static_cast<int>(io::read_pod<std::uint32_t>(in, "embed_dim"));
  cfg.hidden_dim = static_cast<int>(io::read_pod<std::uint32_t>(in, "hidden_dim"));
  cfg.max_decode_len = static_cast<int>(io::read_pod<std::uint32_t>(in, "max_decode_len"));
  cfg.use_context = io::read_pod<std::uint8_t>(in, "use_context") != 0;
  const auto source = io::read_pod<std::uint8_t>(in, "context_source");
  if (source != 0) throw Error(ErrorCode::kFormat, "unknown context source");
  cfg.context_source = ContextSource::kEncoderFinal;
  io::read_pod<std::uint16_t>(in, "reserved");
  model.split_seed = io::read_pod<std::int64_t>(in, "split_seed");
  model.min_count = io::read_pod<std::uint32_t>(in, "min_count");
  cfg.validate();

  const auto n_tokens = io::read_pod<std::uint32_t>(in, "vocabulary size");
  std::vector<std::string> tokens;
  tokens.reserve(n_tokens);
  for (std::uint32_t i = 0; i < n_tokens; ++i) tokens.push_back(io::read_string(in, "token"));
  if (n_tokens < static_cast<std::uint32_t>(corpus::kNumReserved)) {
    throw Error(ErrorCode::kFormat, "vocabulary misses reserved tokens");
  }
  model.vocab = corpus::Vocabulary(
      std::vector<std::string>(tokens.begin() + corpus::kNumReserved, tokens.end()));
  if (model.vocab.tokens() != tokens) {
    throw Error(ErrorCode::kFormat, "vocabulary is not a bijection with reserved prefix");
  }

  const auto n_tensors = io::read_pod<std::uint32_t>(in, "tensor count");
  if (n_tensors != 9) throw Error(ErrorCode::kFormat, "expected 9 tensors");
  model.params = Seq2SeqParams::zeros(cfg, tokens.size());
  model.params.for_each([&](std::string_view name, auto& t) { read_tensor(in, name, t); });
  if (!model.params.all_finite()) throw Error(ErrorCode::kFormat, "checkpoint has non-finite weights");
  return model;
}

void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write checkpoint: " + path);
  save_checkpoint(model, out);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace dialogforge::seq2seq
