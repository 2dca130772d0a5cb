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

#include "dialogforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "dialogforge/errors.hpp"
#include "dialogforge/hybrid.hpp"

namespace dialogforge::metrics {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  const auto len = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += tokens[static_cast<std::size_t>(i + k)];
    }
    ++counts[key];
  }
  return counts;
}

NgramPrecision pair_precision(const Utterance& cand, const Utterance& ref, int n) {
  NgramPrecision p;
  const auto c = count_ngrams(cand.tokens, n);
  const auto r = count_ngrams(ref.tokens, n);
  for (const auto& [gram, count] : c) {
    p.total += count;
    auto it = r.find(gram);
    if (it != r.end()) p.matches += std::min(count, it->second);
  }
  return p;
}

void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kShapeMismatch, "candidate and reference lists differ in length (" +
                                               std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

double ratio_or_one(std::size_t num, std::size_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 1.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

NgramPrecision modified_ngram_precision(std::span<const Utterance> candidates,
                                        std::span<const Utterance> references, int n) {
  check_aligned(candidates.size(), references.size());
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  NgramPrecision total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto p = pair_precision(candidates[i], references[i], n);
    total.matches += p.matches;
    total.total += p.total;
  }
  return total;
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    orders[n].matches += o.orders[n].matches;
    orders[n].total += o.orders[n].total;
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

BleuStats bleu_stats(std::span<const Utterance> candidates, std::span<const Utterance> references) {
  check_aligned(candidates.size(), references.size());
  BleuStats stats;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (int n = 1; n <= kBleuOrder; ++n) {
      const auto p = pair_precision(candidates[i], references[i], n);
      stats.orders[n - 1].matches += p.matches;
      stats.orders[n - 1].total += p.total;
    }
    stats.candidate_length += candidates[i].size();
    stats.reference_length += references[i].size();
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  int used = 0;
  for (const auto& p : stats.orders) {
    if (p.total == 0) continue;
    const double precision = p.matches == 0 ? kBleuEpsilon / static_cast<double>(p.total) : p.ratio();
    log_sum += std::log(precision);
    ++used;
  }
  if (used == 0) return 0.0;
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c <= r ? std::exp(1.0 - r / c) : 1.0;
  const double score = 100.0 * bp * std::exp(log_sum / used);
  return std::clamp(score, 0.0, 100.0);
}

double bleu(std::span<const Utterance> candidates, std::span<const Utterance> references) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "BLEU needs at least one pair");
  return bleu_from_stats(bleu_stats(candidates, references));
}

double mean_sentence_bleu(std::span<const Utterance> candidates,
                          std::span<const Utterance> references) {
  check_aligned(candidates.size(), references.size());
  if (candidates.empty()) throw Error(ErrorCode::kEmptyInput, "BLEU needs at least one pair");
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores.push_back(bleu_from_stats(bleu_stats(candidates.subspan(i, 1), references.subspan(i, 1))));
  }
  std::sort(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

EqmResult eqm(std::span<const Utterance> predictions, std::span<const Utterance> references) {
  check_aligned(predictions.size(), references.size());
  EqmResult r;
  for (std::size_t i = 0; i < references.size(); ++i) {
    if (!hybrid::is_api_call(references[i])) continue;
    ++r.api_references;
    if (predictions[i] == references[i]) ++r.matches;
  }
  r.degenerate = r.api_references == 0;
  r.value = r.degenerate ? 0.0
                         : static_cast<double>(r.matches) / static_cast<double>(r.api_references);
  return r;
}

TimingResult timing_from_counts(const ConfusionCounts& counts) {
  TimingResult r;
  r.counts = counts;
  r.precision = ratio_or_one(counts.tp, counts.tp + counts.fp, r.degenerate);
  r.recall = ratio_or_one(counts.tp, counts.tp + counts.fn, r.degenerate);
  r.accuracy = ratio_or_one(counts.tp + counts.tn, counts.total(), r.degenerate);
  return r;
}

TimingResult api_timing(std::span<const Utterance> predictions,
                        std::span<const Utterance> references) {
  check_aligned(predictions.size(), references.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const bool pred = hybrid::is_api_call(predictions[i]);
    const bool ref = hybrid::is_api_call(references[i]);
    if (pred && ref) ++c.tp;
    else if (pred) ++c.fp;
    else if (ref) ++c.fn;
    else ++c.tn;
  }
  return timing_from_counts(c);
}

Diagnostics length_and_unigram_diagnostics(std::span<const Utterance> generated,
                                           std::span<const Utterance> references) {
  if (generated.empty() || references.empty()) {
    throw Error(ErrorCode::kEmptyInput, "diagnostics need non-empty lists");
  }
  Diagnostics d;
  std::size_t gen_tokens = 0;
  std::map<std::string, std::size_t> counts;
  for (const auto& u : generated) {
    gen_tokens += u.size();
    for (const auto& t : u.tokens) ++counts[t];
  }
  std::size_t ref_tokens = 0;
  for (const auto& u : references) ref_tokens += u.size();
  d.avg_generated_length = static_cast<double>(gen_tokens) / static_cast<double>(generated.size());
  d.avg_reference_length = static_cast<double>(ref_tokens) / static_cast<double>(references.size());
  for (const auto& [tok, n] : counts) {
    d.unigram_distribution[tok] = static_cast<double>(n) / static_cast<double>(gen_tokens);
  }
  return d;
}

}  // namespace dialogforge::metrics
