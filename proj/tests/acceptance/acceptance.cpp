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

// Acceptance gate. Runs the eight criteria and prints one PASS/FAIL line per
// criterion. Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dialogforge/belief.hpp"
#include "dialogforge/dialogforge.h"
#include "dialogforge/evaluation.hpp"
#include "dialogforge/generators.hpp"
#include "dialogforge/hybrid.hpp"
#include "dialogforge/metrics.hpp"
#include "dialogforge/pipeline.hpp"
#include "dialogforge/rng.hpp"
#include "gradcheck.hpp"

namespace fs = std::filesystem;
using namespace dialogforge;

namespace {

constexpr std::int64_t kCorpusSeed = 7;
constexpr std::size_t kCorpusSize = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  Outcome result;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void log(const std::string& s) {
  std::printf("  %s\n", s.c_str());
  std::fflush(stdout);
}

std::string describe(const char* tag, const metrics::EvalReport& r) {
  std::ostringstream o;
  o << tag << " bleu=" << fmt("%.2f", r.bleu) << " P=" << fmt("%.3f", r.precision)
    << " R=" << fmt("%.3f", r.recall) << " Acc=" << fmt("%.3f", r.accuracy)
    << " EQM=" << fmt("%.3f", r.eqm) << " gen_len=" << fmt("%.2f", r.avg_gen_len)
    << " ref_len=" << fmt("%.2f", r.avg_ref_len);
  return o.str();
}

// Library defaults for everything the criteria leave open.
pipeline::RunConfig default_run(bool use_context) {
  pipeline::RunConfig c;
  c.model.use_context = use_context;
  c.model.max_decode_len = 40;
  c.apply_seed(kCorpusSeed);
  return c;
}

struct Trained {
  seq2seq::Model model;
  corpus::CorpusSplit split;
};

Trained train(const std::vector<corpus::Dialog>& dialogs, bool use_context, const char* tag) {
  const auto t0 = Clock::now();
  const auto cfg = default_run(use_context);
  auto outcome = pipeline::train_model(cfg, dialogs);
  Trained t{std::move(outcome.model), {}};
  t.split = pipeline::split_for(t.model, dialogs);
  log(std::string(tag) + ": trained " + std::to_string(cfg.train.epochs) + " epochs in " +
      fmt("%.0f", seconds_since(t0)) + " s, best epoch " + std::to_string(outcome.best_epoch) +
      ", val loss " + fmt("%.4f", outcome.history[static_cast<std::size_t>(outcome.best_epoch)].val_loss));
  return t;
}

metrics::Evaluation evaluate(int id, const Trained& t, const belief::StateActionStore* store) {
  return metrics::evaluate_model([&] { return metrics::make_responder(id, t.model, store); },
                                 t.split.test, id, 1);
}

// ---------------------------------------------------------------------------

Outcome criterion_bleu_reproduction() {
  const auto t0 = Clock::now();
  const auto dialogs = corpus::generate_restaurant_corpus(kCorpusSize, kCorpusSeed);
  const auto m2 = train(dialogs, true, "restaurant model 2");
  const auto r2 = evaluate(2, m2, nullptr).report;
  log(describe("model 2", r2));
  const auto m1 = train(dialogs, false, "restaurant model 1");
  const auto r1 = evaluate(1, m1, nullptr).report;
  log(describe("model 1", r1));
  const double elapsed = seconds_since(t0);
  const bool levels = r2.precision >= 0.95 && r2.recall >= 0.95 && r2.accuracy >= 0.95 && r2.bleu >= 85.0;
  const bool ordering = r1.accuracy < r2.accuracy && r1.bleu < r2.bleu;
  const bool eqm = r2.eqm >= r1.eqm;
  const bool budget = elapsed <= 45.0 * 60.0;
  std::ostringstream o;
  o << "M2 bleu " << fmt("%.2f", r2.bleu) << " P/R/Acc " << fmt("%.3f", r2.precision) << "/"
    << fmt("%.3f", r2.recall) << "/" << fmt("%.3f", r2.accuracy) << "; M1 bleu "
    << fmt("%.2f", r1.bleu) << " Acc " << fmt("%.3f", r1.accuracy) << "; EQM M2 "
    << fmt("%.3f", r2.eqm) << " vs M1 " << fmt("%.3f", r1.eqm) << "; " << fmt("%.0f", elapsed)
    << " s";
  if (!levels) o << " [M2 levels missed]";
  if (!ordering) o << " [M1 not below M2]";
  if (!eqm) o << " [EQM order]";
  if (!budget) o << " [over 45 min]";
  return {levels && ordering && eqm && budget, o.str()};
}

struct SupportResults {
  Outcome directionality, structure, closure;
};

SupportResults criteria_support() {
  const auto dialogs = corpus::generate_support_corpus(kCorpusSize, kCorpusSeed);
  const auto t = train(dialogs, true, "support model 2");
  const auto dec = belief::extract_store(t.model, belief::BeliefMode::kDecoderFinal, t.split.train);
  const auto enc = belief::extract_store(t.model, belief::BeliefMode::kEncoderFinal, t.split.train);
  log("stores: " + std::to_string(dec.size()) + " pairs from " +
      std::to_string(t.split.train.size()) + " training dialogs");
  const auto e2 = evaluate(2, t, nullptr);
  const auto e3 = evaluate(3, t, &enc);
  const auto e4 = evaluate(4, t, &dec);
  const auto e5 = evaluate(5, t, &dec);
  log(describe("model 2", e2.report));
  log(describe("model 3", e3.report));
  log(describe("model 4", e4.report));
  log(describe("model 5", e5.report));

  SupportResults out;
  {
    const double b2 = e2.report.bleu, b4 = e4.report.bleu, b5 = e5.report.bleu;
    const double q2 = e2.report.eqm, q4 = e4.report.eqm, q5 = e5.report.eqm;
    const bool nn_beats = b4 > b2;
    const bool hybrid_bleu = b5 >= std::max(b2, b4) - 1.0;
    const bool hybrid_eqm = q5 >= q4 && q5 >= q2 - 0.02;
    std::size_t differ = 0;
    for (std::size_t i = 0; i < e2.predictions.size(); ++i) {
      differ += e2.predictions[i].prediction != e4.predictions[i].prediction;
    }
    std::ostringstream o;
    o << "bleu M2 " << fmt("%.2f", b2) << " M4 " << fmt("%.2f", b4) << " M5 " << fmt("%.2f", b5)
      << "; EQM M2 " << fmt("%.3f", q2) << " M4 " << fmt("%.3f", q4) << " M5 " << fmt("%.3f", q5)
      << "; M4 differs from M2 on " << differ << "/" << e2.predictions.size() << " turns";
    if (!nn_beats) o << " [M4 not above M2]";
    if (!hybrid_bleu) o << " [M5 bleu]";
    if (!hybrid_eqm) o << " [M5 EQM]";
    out.directionality = {nn_beats && hybrid_bleu && hybrid_eqm, o.str()};
  }
  {
    std::size_t api2 = 0, verbatim = 0, superset = 0;
    for (std::size_t i = 0; i < e2.predictions.size(); ++i) {
      const auto& p2 = e2.predictions[i];
      const auto& p5 = e5.predictions[i];
      if (!hybrid::is_api_call(p2.prediction)) continue;
      ++api2;
      verbatim += p5.prediction.text() == p2.prediction.text();
      superset += hybrid::is_api_call(p5.prediction);
    }
    const bool aligned = e2.predictions.size() == e5.predictions.size();
    const bool recall = e5.report.recall >= e2.report.recall;
    const bool ok = aligned && verbatim == api2 && superset == api2 && recall;
    std::ostringstream o;
    o << api2 << " Seq2Seq api turns, " << verbatim << " verbatim in hybrid, " << superset
      << " kept positive; recall M5 " << fmt("%.3f", e5.report.recall) << " >= M2 "
      << fmt("%.3f", e2.report.recall);
    out.structure = {ok, o.str()};
  }
  {
    std::set<std::string> actions;
    for (const auto& d : t.split.train) {
      for (const auto& turn : d.turns) actions.insert(turn.agent.text());
    }
    std::size_t total = 0, outside = 0;
    for (const auto* ev : {&e3, &e4}) {
      for (const auto& p : ev->predictions) {
        ++total;
        outside += actions.count(p.prediction.text()) == 0;
      }
    }
    out.closure = {outside == 0, std::to_string(total - outside) + "/" + std::to_string(total) +
                                     " Model 3/4 responses are training actions (" +
                                     std::to_string(actions.size()) + " distinct)"};
  }
  return out;
}

Outcome criterion_ball_tree() {
  Rng rng(20240);
  const auto random_points = [&](Eigen::Index n) {
    belief::PointMatrix p(n, 64);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.unit() * 2.0 - 1.0;
    return p;
  };
  const auto points = random_points(2000);
  const auto queries = random_points(1000);
  const auto t0 = Clock::now();
  const belief::BallTree tree(points, belief::BallTree::kDefaultLeafSize);
  std::vector<belief::BallTree::Neighbor> got;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    got.push_back(tree.nearest(std::span<const double>(queries.row(q).data(), 64)));
  }
  const double elapsed = seconds_since(t0);
  std::size_t index_ok = 0, dist_ok = 0;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const double d = (points.row(i) - queries.row(q)).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::size_t>(i);
      }
    }
    const auto& g = got[static_cast<std::size_t>(q)];
    index_ok += g.index == best;
    dist_ok += std::abs(g.distance - best_d) <= 1e-12;
  }
  const bool ok = index_ok == 1000 && dist_ok == 1000 && elapsed <= 5.0;
  return {ok, std::to_string(index_ok) + "/1000 indices, " + std::to_string(dist_ok) +
                  "/1000 distances within 1e-12; build+query " + fmt("%.3f", elapsed) + " s"};
}

Outcome criterion_gradients() {
  const auto gc = dftest::run_gradient_check(1e-5);
  std::ostringstream o;
  o << "V=" << gc.vocab_size << ", max relative error " << fmt("%.3g", gc.max_rel_error())
    << " over " << gc.tensors.size() << " tensors (";
  for (std::size_t i = 0; i < gc.tensors.size(); ++i) {
    o << (i ? ", " : "") << gc.tensors[i].name << " " << fmt("%.1e", gc.tensors[i].max_rel_error);
  }
  o << ")";
  return {gc.vocab_size == 12 && gc.max_rel_error() < 1e-4, o.str()};
}

Outcome criterion_metric_oracles() {
  using metrics::Utterance;
  auto u = [](const char* s) { return Utterance::from_text(s); };
  std::vector<std::string> failed;

  const std::vector<Utterance> ident{u("the cat sat on the mat"), u("hello there friend")};
  if (metrics::bleu(ident, ident) != 100.0) failed.push_back("identity");

  const std::vector<Utterance> c1{u("the the the the the the the")}, r1{u("the cat is on the mat")};
  const auto p = metrics::modified_ngram_precision(c1, r1, 1);
  if (!(p.matches == 2 && p.total == 7)) failed.push_back("clipped precision");

  std::vector<Utterance> cands, refs;
  std::ifstream in(DF_SOURCE_DIR "/tests/data/bleu_mini.tsv");
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    cands.push_back(Utterance::from_text(line.substr(0, tab)));
    refs.push_back(Utterance::from_text(line.substr(tab + 1)));
  }
  // hand computation: p1..p4 = 10/12, 6/9, 4/6, 3/3 and c = r = 12
  const double mini_expected = 100.0 * std::pow((10.0 / 12) * (6.0 / 9) * (4.0 / 6), 0.25);
  const double mini = cands.size() == 3 ? metrics::bleu(cands, refs) : -1.0;
  if (std::abs(mini - mini_expected) > 1e-6) failed.push_back("mini-corpus");

  const std::vector<Utterance> eq_pred{u("api_call italian rome four expensive")};
  const std::vector<Utterance> eq_ref{u("api_call italian rome four cheap")};
  if (metrics::eqm(eq_pred, eq_ref).matches != 0) failed.push_back("EQM partial");

  const std::vector<Utterance> tp{u("api_call x"), u("ok"), u("api_call y")};
  const std::vector<Utterance> tr{u("api_call x"), u("api_call z"), u("fine")};
  const auto timing = metrics::api_timing(tp, tr);
  if (!(timing.precision == 0.5 && timing.recall == 0.5 && timing.accuracy == 1.0 / 3.0)) {
    failed.push_back("timing");
  }

  std::ostringstream o;
  o << "identity 100, clipped " << p.matches << "/" << p.total << ", mini-corpus "
    << fmt("%.6f", mini) << " vs " << fmt("%.6f", mini_expected) << ", timing P/R/Acc "
    << fmt("%.4f", timing.precision) << "/" << fmt("%.4f", timing.recall) << "/"
    << fmt("%.4f", timing.accuracy);
  for (const auto& f : failed) o << " [" << f << "]";
  return {failed.empty(), o.str()};
}

// Runs the same steps the CLI subcommands run, through the C API, twice.
Outcome criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "dialogforge_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<std::string> mismatches;
  std::vector<std::string> errors;
  auto ok = [&](df_status s, const char* what) {
    if (s != DF_OK) errors.push_back(std::string(what) + ": " + df_last_error_message());
    return s == DF_OK;
  };
  auto run = [&](const std::string& tag) -> std::vector<std::pair<std::string, std::string>> {
    const auto base = dir / tag;
    fs::create_directories(base);
    df_corpus* c = nullptr;
    if (!ok(df_corpus_generate("restaurant", 200, 3, &c), "gen-data")) return {};
    ok(df_corpus_write_text(c, (base / "r.txt").string().c_str()), "write text");
    ok(df_corpus_write_jsonl(c, (base / "r.jsonl").string().c_str()), "write jsonl");
    {
      std::ofstream cfg(base / "cfg.json");
      cfg << "{\"corpus\": \"" << (base / "r.txt").string() << "\", \"checkpoint\": \""
          << (base / "m.s2sd").string() << "\", \"loss_log\": \"" << (base / "loss.tsv").string()
          << "\", \"seed\": 3, \"model\": {\"max_decode_len\": 40}, \"train\": {\"epochs\": 3}}";
    }
    df_model* m = nullptr;
    df_store* s = nullptr;
    if (ok(df_train_from_config((base / "cfg.json").string().c_str(), nullptr, &m), "train") &&
        ok(df_store_build(m, c, "decoder", nullptr, 32, &s), "index")) {
      ok(df_store_save(s, (base / "s.bsnn").string().c_str()), "save store");
      ok(df_evaluate(m, s, c, 5, 1, (base / "report.json").string().c_str(),
                     (base / "pred.jsonl").string().c_str(), nullptr),
         "eval");
    }
    df_store_free(s);
    df_model_free(m);
    df_corpus_free(c);
    std::vector<std::pair<std::string, std::string>> files;
    for (const char* f : {"r.txt", "r.jsonl", "m.s2sd", "loss.tsv", "s.bsnn", "report.json", "pred.jsonl"}) {
      files.emplace_back(f, slurp(base / f));
    }
    return files;
  };
  const auto a = run("a");
  const auto b = run("b");
  if (a.size() != b.size() || a.empty()) return {false, "runs did not complete"};
  std::size_t empty = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    empty += a[i].second.empty();
    if (a[i].second != b[i].second) mismatches.push_back(a[i].first);
  }
  std::ostringstream o;
  o << "gen-data, train, index, eval rerun: " << (a.size() - mismatches.size()) << "/" << a.size()
    << " artifacts byte-identical";
  for (const auto& m : mismatches) o << " [" << m << " differs]";
  for (const auto& e : errors) o << " [" << e << "]";
  if (empty) o << " [" << empty << " empty artifacts]";
  return {mismatches.empty() && errors.empty() && empty == 0, o.str()};
}

}  // namespace

int main() {
  std::vector<Criterion> crit{
      {1, "bAbI-style reproduction (restaurant, Model 2 vs Model 1)", {}},
      {2, "hybrid directionality (support, Models 2/4/5)", {}},
      {3, "hybrid structural invariants", {}},
      {4, "ball-tree exactness", {}},
      {5, "gradient correctness", {}},
      {6, "metric oracles", {}},
      {7, "determinism", {}},
      {8, "retrieval closure", {}},
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  auto report = [&](int id) {
    const auto& c = crit[static_cast<std::size_t>(id - 1)];
    std::printf("criterion %d %s: %s | %s\n", c.id, c.result.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.result.detail.c_str());
    std::fflush(stdout);
  };
  const auto t0 = Clock::now();

  crit[3].result = guarded(criterion_ball_tree);
  report(4);
  crit[4].result = guarded(criterion_gradients);
  report(5);
  crit[5].result = guarded(criterion_metric_oracles);
  report(6);
  crit[6].result = guarded(criterion_determinism);
  report(7);
  crit[0].result = guarded(criterion_bleu_reproduction);
  report(1);
  try {
    const auto s = criteria_support();
    crit[1].result = s.directionality;
    crit[2].result = s.structure;
    crit[7].result = s.closure;
  } catch (const std::exception& e) {
    for (int i : {1, 2, 7}) crit[static_cast<std::size_t>(i)].result = {false, std::string("exception: ") + e.what()};
  }
  report(2);
  report(3);
  report(8);

  std::printf("\nsummary (%.0f s)\n", seconds_since(t0));
  int failed = 0;
  for (const auto& c : crit) {
    std::printf("%s criterion %d: %s\n", c.result.pass ? "PASS" : "FAIL", c.id, c.name.c_str());
    failed += !c.result.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(crit.size()) - failed, crit.size());
  return failed == 0 ? 0 : 1;
}
