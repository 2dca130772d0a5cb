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

// Command-line front end. Talks to the library only through the C API.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dialogforge/dialogforge.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CallError : std::runtime_error {
  df_status status;
  CallError(df_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(df_status s, const char* what) {
  if (s != DF_OK) {
    throw CallError(s, std::string(what) + ": " + df_status_string(s) + ": " +
                           df_last_error_message());
  }
}

// RAII for the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { if (p) Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Corpus = Handle<df_corpus, df_corpus_free>;
using Model = Handle<df_model, df_model_free>;
using Store = Handle<df_store, df_store_free>;
using Session = Handle<df_session, df_session_free>;

std::optional<std::int64_t> env_seed() {
  const char* raw = std::getenv("DIALOGFORGE_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("DIALOGFORGE_SEED is not an integer: " + s);
  }
  return v;
}

// Only the path fields of a run config; the library validates the rest.
struct ConfigPaths {
  std::string corpus, checkpoint, store, report, predictions, belief_mode;
};

ConfigPaths read_config_paths(const std::string& path) {
  ConfigPaths c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw CallError(DF_ERR_IO, "cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CallError(DF_ERR_PARSE, std::string("config is not valid JSON: ") + e.what());
  }
  auto get = [&](const char* key, std::string& out) {
    if (j.contains(key) && j[key].is_string()) out = j[key].get<std::string>();
  };
  get("corpus", c.corpus);
  get("checkpoint", c.checkpoint);
  get("store", c.store);
  get("report", c.report);
  get("predictions", c.predictions);
  get("belief_mode", c.belief_mode);
  return c;
}

const std::string& pick(const std::string& flag, const std::string& fallback, const char* name) {
  const std::string& v = flag.empty() ? fallback : flag;
  if (v.empty()) throw UsageError(std::string("missing --") + name);
  return v;
}

std::string jsonl_sidecar(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".jsonl") throw UsageError("--out should name the text file, not .jsonl");
  p.replace_extension(".jsonl");
  return p.string();
}

bool needs_store(int model) { return model >= 3; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dialogforge: Seq2Seq and belief-state retrieval dialog models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(df_version()));

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus");
  std::string domain, gen_out;
  std::size_t n_dialogs = 1000;
  std::optional<std::int64_t> gen_seed;
  gen->add_option("--domain", domain, "restaurant or support")->required();
  gen->add_option("-n,--dialogs", n_dialogs, "Number of dialogs");
  gen->add_option("--seed", gen_seed, "Generator seed (default: DIALOGFORGE_SEED or 0)");
  gen->add_option("-o,--out", gen_out, "bAbI-style text output; a .jsonl sidecar is written next to it")
      ->required();

  auto* train = app.add_subcommand("train", "Train a Seq2Seq checkpoint from a run config");
  std::string train_config;
  train->add_option("-c,--config", train_config, "Run config JSON")->required();

  auto* index = app.add_subcommand("index", "Build a state-action store");
  std::string idx_config, idx_checkpoint, idx_corpus, idx_mode, idx_out, idx_metric = "euclidean";
  std::size_t leaf_size = 32;
  index->add_option("-c,--config", idx_config, "Run config JSON supplying defaults");
  index->add_option("--checkpoint", idx_checkpoint);
  index->add_option("--corpus", idx_corpus);
  index->add_option("--mode", idx_mode, "encoder, decoder or concat");
  index->add_option("--metric", idx_metric, "euclidean or cosine");
  index->add_option("--leaf-size", leaf_size);
  index->add_option("-o,--out", idx_out, "Store snapshot path");

  auto* eval = app.add_subcommand("eval", "Evaluate model 1..5 on the test split");
  std::string ev_config, ev_checkpoint, ev_store, ev_corpus, ev_report, ev_predictions;
  int ev_model = 0;
  unsigned ev_threads = 1;
  eval->add_option("-c,--config", ev_config, "Run config JSON supplying defaults");
  eval->add_option("--checkpoint", ev_checkpoint);
  eval->add_option("--store", ev_store, "Required for models 3, 4 and 5");
  eval->add_option("--corpus", ev_corpus);
  eval->add_option("--model", ev_model, "1..5")->required();
  eval->add_option("--report", ev_report, "EvalReport JSON output");
  eval->add_option("--predictions", ev_predictions, "Predictions JSONL output");
  eval->add_option("--threads", ev_threads, "Dialog fan-out");

  auto* chat = app.add_subcommand("chat", "Interactive session on stdin");
  std::string ch_config, ch_checkpoint, ch_store;
  int ch_model = 2;
  chat->add_option("-c,--config", ch_config, "Run config JSON supplying defaults");
  chat->add_option("--checkpoint", ch_checkpoint);
  chat->add_option("--store", ch_store);
  chat->add_option("--model", ch_model, "1..5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      const std::int64_t seed = gen_seed ? *gen_seed : env_seed().value_or(0);
      const std::string sidecar = jsonl_sidecar(gen_out);
      Corpus c;
      check(df_corpus_generate(domain.c_str(), n_dialogs, seed, c.out()), "generate");
      check(df_corpus_write_text(c.get(), gen_out.c_str()), "write text");
      check(df_corpus_write_jsonl(c.get(), sidecar.c_str()), "write jsonl");
      std::cout << "dialogs " << df_corpus_dialog_count(c.get()) << "\nturns "
                << df_corpus_turn_count(c.get()) << "\n";
    } else if (*train) {
      const auto seed = env_seed();
      Model m;
      check(df_train_from_config(train_config.c_str(), seed ? &*seed : nullptr, m.out()), "train");
      std::cout << "vocab " << df_model_vocab_size(m.get()) << "\n";
    } else if (*index) {
      const auto cfg = read_config_paths(idx_config);
      const auto& checkpoint = pick(idx_checkpoint, cfg.checkpoint, "checkpoint");
      const auto& corpus_path = pick(idx_corpus, cfg.corpus, "corpus");
      const auto& mode = pick(idx_mode, cfg.belief_mode, "mode");
      const auto& out = pick(idx_out, cfg.store, "out");
      Model m;
      Corpus c;
      Store s;
      check(df_model_load(checkpoint.c_str(), m.out()), "load checkpoint");
      check(df_corpus_load(corpus_path.c_str(), c.out()), "load corpus");
      check(df_store_build(m.get(), c.get(), mode.c_str(), idx_metric.c_str(), leaf_size, s.out()),
            "index");
      check(df_store_save(s.get(), out.c_str()), "save store");
      std::cout << "pairs " << df_store_size(s.get()) << "\ndim " << df_store_dim(s.get())
                << "\nmode " << df_store_mode(s.get()) << "\n";
    } else if (*eval) {
      const auto cfg = read_config_paths(ev_config);
      const auto& checkpoint = pick(ev_checkpoint, cfg.checkpoint, "checkpoint");
      const auto& corpus_path = pick(ev_corpus, cfg.corpus, "corpus");
      if (ev_model < 1 || ev_model > 5) throw UsageError("--model must be 1..5");
      std::string store_path = ev_store;
      if (needs_store(ev_model)) store_path = pick(ev_store, cfg.store, "store");
      const std::string report = ev_report.empty() ? cfg.report : ev_report;
      const std::string preds = ev_predictions.empty() ? cfg.predictions : ev_predictions;
      Model m;
      Corpus c;
      Store s;
      check(df_model_load(checkpoint.c_str(), m.out()), "load checkpoint");
      check(df_corpus_load(corpus_path.c_str(), c.out()), "load corpus");
      if (!store_path.empty() && needs_store(ev_model)) {
        check(df_store_load(store_path.c_str(), s.out()), "load store");
      }
      df_eval_summary r{};
      check(df_evaluate(m.get(), s.get(), c.get(), ev_model, ev_threads,
                        report.empty() ? nullptr : report.c_str(),
                        preds.empty() ? nullptr : preds.c_str(), &r),
            "eval");
      std::printf("model %d\ndialogs %llu\nturns %llu\nbleu %.4f\neqm %.4f\nprecision %.4f\n"
                  "recall %.4f\naccuracy %.4f\navg_gen_len %.4f\navg_ref_len %.4f\n",
                  r.model, static_cast<unsigned long long>(r.dialogs),
                  static_cast<unsigned long long>(r.turns), r.bleu, r.eqm, r.precision, r.recall,
                  r.accuracy, r.avg_gen_len, r.avg_ref_len);
    } else if (*chat) {
      const auto cfg = read_config_paths(ch_config);
      const auto& checkpoint = pick(ch_checkpoint, cfg.checkpoint, "checkpoint");
      if (ch_model < 1 || ch_model > 5) throw UsageError("--model must be 1..5");
      Model m;
      Store s;
      check(df_model_load(checkpoint.c_str(), m.out()), "load checkpoint");
      if (needs_store(ch_model)) {
        const auto& store_path = pick(ch_store, cfg.store, "store");
        check(df_store_load(store_path.c_str(), s.out()), "load store");
      }
      Session session;
      check(df_session_create(m.get(), s.get(), ch_model, session.out()), "session");
      std::string line;
      while (std::getline(std::cin, line)) {
        if (line == "/reset") {
          df_session_reset(session.get());
          std::cout << "[reset]" << std::endl;
          continue;
        }
        const char* response = nullptr;
        df_source source = DF_SOURCE_SEQ2SEQ;
        check(df_session_respond(session.get(), line.c_str(), &response, &source), "respond");
        std::cout << "[" << (source == DF_SOURCE_SEQ2SEQ ? "seq2seq" : "nearest_neighbor")
                  << "] " << response << std::endl;
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CallError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.status == DF_ERR_USAGE ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
