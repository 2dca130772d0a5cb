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

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "dialogforge/corpus.hpp"

namespace dialogforge::metrics {

using corpus::Utterance;

inline constexpr int kBleuOrder = 4;
inline constexpr double kBleuEpsilon = 1e-9;

/// Corpus-level clipped n-gram counts.
struct NgramPrecision {
  std::size_t matches = 0;  // clipped
  std::size_t total = 0;    // candidate n-grams
  double ratio() const {
    return total == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(total);
  }
};

NgramPrecision modified_ngram_precision(std::span<const Utterance> candidates,
                                        std::span<const Utterance> references, int n);

struct BleuStats {
  std::array<NgramPrecision, kBleuOrder> orders{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(std::span<const Utterance> candidates, std::span<const Utterance> references);

/// BLEU-4 in [0, 100] from pooled counts: uniform weights, brevity penalty
/// exp(1 - r/c) when c <= r. An order with candidate n-grams but no match
/// uses epsilon / total as its precision; an order with no candidate n-grams
/// at all is left out and the weights are renormalized.
double bleu_from_stats(const BleuStats& stats);

/// Corpus BLEU over aligned lists. Throws EmptyInput.
double bleu(std::span<const Utterance> candidates, std::span<const Utterance> references);

/// Mean of per-pair sentence BLEU, summed in sorted order so the result does
/// not depend on pair order.
double mean_sentence_bleu(std::span<const Utterance> candidates,
                          std::span<const Utterance> references);

struct EqmResult {
  std::size_t matches = 0;
  std::size_t api_references = 0;
  double value = 0.0;
  bool degenerate = false;  // no api_call references
};

/// Fraction of api_call references whose prediction is token-for-token equal.
EqmResult eqm(std::span<const Utterance> predictions, std::span<const Utterance> references);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct TimingResult {
  ConfusionCounts counts;
  double precision = 1.0;
  double recall = 1.0;
  double accuracy = 1.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 1.0
};

/// Positive = the utterance is an api_call.
TimingResult api_timing(std::span<const Utterance> predictions,
                        std::span<const Utterance> references);
TimingResult timing_from_counts(const ConfusionCounts& counts);

struct Diagnostics {
  double avg_generated_length = 0.0;
  double avg_reference_length = 0.0;
  std::map<std::string, double> unigram_distribution;  // generated text
};

Diagnostics length_and_unigram_diagnostics(std::span<const Utterance> generated,
                                           std::span<const Utterance> references);

}  // namespace dialogforge::metrics
