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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialogforge::corpus {

inline constexpr std::string_view kSilence = "<SILENCE>";
inline constexpr std::string_view kApiCallMarker = "api_call";
inline constexpr std::size_t kMaxTurns = 20;

/// A whitespace-free, lowercase token sequence. Never empty; a party that
/// says nothing is represented by the single token <SILENCE>.
struct Utterance {
  std::vector<std::string> tokens;

  Utterance() = default;
  explicit Utterance(std::vector<std::string> toks);

  /// Splits on ASCII whitespace. Throws EmptyUtterance on blank input.
  static Utterance from_text(std::string_view text);
  static Utterance silence() { return Utterance({std::string(kSilence)}); }

  std::string text() const;
  std::size_t size() const { return tokens.size(); }
  bool is_silence() const { return tokens.size() == 1 && tokens[0] == kSilence; }

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Turn {
  Utterance user;
  Utterance agent;
  std::uint32_t index = 1;  // 1-based

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialog {
  std::string id;
  std::vector<Turn> turns;

  friend bool operator==(const Dialog&, const Dialog&) = default;
};

/// Checks contiguity of turn indices and the turn cap.
void validate_dialog(const Dialog& dialog);

std::size_t count_turns(const std::vector<Dialog>& dialogs);

struct ApiCall {
  std::vector<std::string> args;

  Utterance to_utterance() const;
  std::string text() const { return to_utterance().text(); }
  static std::optional<ApiCall> parse(const Utterance& utterance);
};

// ---------------------------------------------------------------------------
// Vocabulary

enum SpecialToken : std::int32_t {
  kPad = 0,
  kBos = 1,
  kEos = 2,
  kUnk = 3,
  kSilenceId = 4,
};
inline constexpr std::int32_t kNumReserved = 5;

class Vocabulary {
 public:
  /// Reserved tokens only.
  Vocabulary();
  /// Reserved tokens followed by `tokens` in the given order. Tokens that
  /// collide with reserved names are skipped.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  std::size_t size() const { return id_to_token_.size(); }
  bool contains(std::string_view token) const;
  std::int32_t id(std::string_view token) const;  // kUnk when absent
  const std::string& token(std::int32_t id) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<std::int32_t> encode(const Utterance& utterance) const;
  std::vector<std::int32_t> encode(const std::vector<std::string>& tokens) const;
  /// Maps ids back to tokens; special ids are kept as their reserved names.
  std::vector<std::string> decode(const std::vector<std::int32_t>& ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, std::int32_t> token_to_id_;
};

/// Reserved tokens plus every training token with count >= min_count, ids by
/// descending frequency then lexicographic order.
Vocabulary build_vocabulary(const std::vector<Dialog>& train_dialogs, std::size_t min_count);

// ---------------------------------------------------------------------------
// Splits

struct CorpusSplit {
  std::vector<Dialog> train;
  std::vector<Dialog> validation;
  std::vector<Dialog> test;
};

/// test = round(0.2 n), validation = round(0.08 n), train = remainder.
/// Throws TooFewDialogs below 10 dialogs.
CorpusSplit split_corpus(const std::vector<Dialog>& dialogs, std::int64_t seed);

// ---------------------------------------------------------------------------
// Text formats

/// "<turn-id> <user>\t<agent>" lines; blank line between dialogs. Dialog ids
/// are assigned by block order with dialog_id().
std::vector<Dialog> parse_babi_text(std::istream& in);
void write_babi_text(std::ostream& out, const std::vector<Dialog>& dialogs);

/// One JSON object per line: {"id": ..., "turns": [{"user": ..., "agent": ...}]}.
std::vector<Dialog> parse_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const std::vector<Dialog>& dialogs);

/// Loads by extension: ".jsonl" is JSONL, anything else is bAbI text.
std::vector<Dialog> load_corpus(const std::string& path);

std::string dialog_id(std::size_t ordinal);

}  // namespace dialogforge::corpus
