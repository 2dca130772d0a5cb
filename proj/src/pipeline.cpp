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

#include "dialogforge/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dialogforge/errors.hpp"
#include "dialogforge/rng.hpp"
#include "json.hpp"

namespace dialogforge::pipeline {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kUsage, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kUsage, std::string("config field '") + key + "' has the wrong type");
  }
}

belief::Metric parse_metric(const std::string& s) {
  if (s == "euclidean") return belief::Metric::kEuclidean;
  if (s == "cosine") return belief::Metric::kCosine;
  throw Error(ErrorCode::kUsage, "unknown metric '" + s + "' (euclidean|cosine)");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::apply_seed(std::int64_t s) {
  seed = s;
  train.seed = s;
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kUsage, "config must be a JSON object");
  reject_unknown(root,
                 {"corpus", "checkpoint", "store", "report", "predictions", "loss_log", "model",
                  "train", "belief_mode", "metric", "seed", "min_count", "leaf_size"},
                 "config");
  RunConfig c;
  read_field(root, "corpus", c.corpus);
  read_field(root, "checkpoint", c.checkpoint);
  read_field(root, "store", c.store);
  read_field(root, "report", c.report);
  read_field(root, "predictions", c.predictions);
  read_field(root, "loss_log", c.loss_log);
  read_field(root, "min_count", c.min_count);
  read_field(root, "leaf_size", c.leaf_size);
  std::int64_t seed = 0;
  read_field(root, "seed", seed);
  if (root.contains("model")) {
    const auto& m = root["model"];
    if (!m.is_object()) throw Error(ErrorCode::kUsage, "'model' must be an object");
    reject_unknown(m, {"embed_dim", "hidden_dim", "max_decode_len", "use_context"}, "model");
    read_field(m, "embed_dim", c.model.embed_dim);
    read_field(m, "hidden_dim", c.model.hidden_dim);
    read_field(m, "max_decode_len", c.model.max_decode_len);
    read_field(m, "use_context", c.model.use_context);
  }
  if (root.contains("train")) {
    const auto& t = root["train"];
    if (!t.is_object()) throw Error(ErrorCode::kUsage, "'train' must be an object");
    reject_unknown(t, {"epochs", "batch_size", "learning_rate", "gradient_clip_norm", "threads"},
                   "train");
    read_field(t, "epochs", c.train.epochs);
    read_field(t, "batch_size", c.train.batch_size);
    read_field(t, "learning_rate", c.train.learning_rate);
    read_field(t, "gradient_clip_norm", c.train.gradient_clip_norm);
    read_field(t, "threads", c.train.threads);
  }
  std::string mode = belief::to_string(c.belief_mode);
  read_field(root, "belief_mode", mode);
  c.belief_mode = belief::parse_belief_mode(mode);
  std::string metric = "euclidean";
  read_field(root, "metric", metric);
  c.metric = parse_metric(metric);
  c.apply_seed(seed);
  if (c.leaf_size == 0) throw Error(ErrorCode::kUsage, "leaf_size must be positive");
  try {
    c.model.validate();
    c.train.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kUsage, e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::optional<std::int64_t> seed_from_env() {
  const char* raw = std::getenv(kSeedEnvVar);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const std::string s(raw);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kUsage, std::string(kSeedEnvVar) + " is not an integer: " + s);
  }
  return v;
}

std::int64_t init_seed(std::int64_t seed) { return Rng::derive(seed, 2); }

TrainOutcome train_model(const RunConfig& config, const std::vector<corpus::Dialog>& dialogs) {
  const auto split = corpus::split_corpus(dialogs, config.seed);
  TrainOutcome out;
  out.model.config = config.model;
  out.model.split_seed = config.seed;
  out.model.min_count = config.min_count;
  out.model.vocab = corpus::build_vocabulary(split.train, config.min_count);
  const auto train_set = seq2seq::encode_dialogs(split.train, out.model.vocab);
  const auto val_set = seq2seq::encode_dialogs(split.validation, out.model.vocab);
  const auto init = seq2seq::Seq2SeqParams::initialize(config.model, out.model.vocab.size(),
                                                        init_seed(config.seed));
  auto result = seq2seq::train(init, config.model, config.train, train_set, val_set);
  out.model.params = std::move(result.params);
  out.history = std::move(result.history);
  out.best_epoch = result.best_epoch;
  return out;
}

void write_loss_log(std::ostream& out, const std::vector<seq2seq::EpochLoss>& history) {
  out << "epoch\ttrain_loss\tval_loss\tbest_val_loss\n";
  for (const auto& e : history) {
    out << e.epoch << '\t' << format_double(e.train_loss) << '\t' << format_double(e.val_loss)
        << '\t' << format_double(e.best_val_loss) << '\n';
  }
}

TrainOutcome run_train(const RunConfig& config) {
  if (config.corpus.empty()) throw Error(ErrorCode::kUsage, "config has no corpus path");
  if (config.checkpoint.empty()) throw Error(ErrorCode::kUsage, "config has no checkpoint path");
  const auto dialogs = corpus::load_corpus(config.corpus);
  auto outcome = train_model(config, dialogs);
  seq2seq::save_checkpoint(outcome.model, config.checkpoint);
  if (!config.loss_log.empty()) {
    std::ostringstream log;
    write_loss_log(log, outcome.history);
    write_text_file(config.loss_log, log.str());
  }
  return outcome;
}

corpus::CorpusSplit split_for(const seq2seq::Model& model,
                              const std::vector<corpus::Dialog>& dialogs) {
  return corpus::split_corpus(dialogs, model.split_seed);
}

belief::StateActionStore build_store(const seq2seq::Model& model,
                                     const std::vector<corpus::Dialog>& dialogs,
                                     belief::BeliefMode mode, std::size_t leaf_size,
                                     belief::Metric metric) {
  const auto split = split_for(model, dialogs);
  return belief::extract_store(model, mode, split.train, leaf_size, metric);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

}  // namespace dialogforge::pipeline
