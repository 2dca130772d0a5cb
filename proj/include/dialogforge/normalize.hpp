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

#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dialogforge/corpus.hpp"

namespace dialogforge::corpus {

inline constexpr std::string_view kPersonMask = "<PERSON>";
inline constexpr std::string_view kMoneyMask = "<MONEY>";
inline constexpr std::string_view kBrandMask = "<masked>";

/// Lingo shortform -> expansion tokens ("ty" -> "thank you").
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, std::vector<std::string>> entries);

  /// One "shortform<TAB>expansion" pair per line; '#' starts a comment line.
  static Lexicon parse(std::istream& in);
  static Lexicon load(const std::string& path);
  /// The lexicon shipped in config/lingo.tsv, compiled in.
  static const Lexicon& builtin();

  const std::vector<std::string>* find(std::string_view shortform) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

/// Entity lists for de-identification.
struct MaskConfig {
  std::set<std::string, std::less<>> person_names;
  std::set<std::string, std::less<>> brand_terms;

  /// One lowercase term per line; '#' starts a comment line.
  static std::set<std::string, std::less<>> parse_terms(std::istream& in);
  static const MaskConfig& builtin();
};

/// Lowercases and splits punctuation . , ? ! ' into separate tokens.
/// Placeholder tokens of the form <NAME> pass through untouched, and
/// decimal or thousands separators between digits stay attached.
std::vector<std::string> tokenize(std::string_view raw);

/// Levenshtein distance, early exit once it exceeds `limit`.
std::size_t edit_distance(std::string_view a, std::string_view b, std::size_t limit);

/// Full cleanup pipeline: lowercase, punctuation split, entity masking,
/// lingo expansion, then unique edit-distance-1 spell correction against
/// `vocab_hint` (skipped when null). Throws EmptyUtterance on blank input.
Utterance normalize_utterance(std::string_view raw, const Lexicon& lexicon,
                              const Vocabulary* vocab_hint,
                              const MaskConfig& masks = MaskConfig::builtin());

}  // namespace dialogforge::corpus
