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

#include "dialogforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "dialogforge/errors.hpp"
#include "dialogforge/rng.hpp"

namespace dialogforge::corpus {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

const char* const kReserved[kNumReserved] = {"<PAD>", "<BOS>", "<EOS>", "<UNK>", "<SILENCE>"};

}  // namespace

Utterance::Utterance(std::vector<std::string> toks) : tokens(std::move(toks)) {
  if (tokens.empty()) throw Error(ErrorCode::kEmptyUtterance, "utterance has no tokens");
}

Utterance Utterance::from_text(std::string_view text) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) toks.emplace_back(text.substr(i, j - i));
    i = j;
  }
  if (toks.empty()) throw Error(ErrorCode::kEmptyUtterance, "empty utterance");
  return Utterance(std::move(toks));
}

std::string Utterance::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

void validate_dialog(const Dialog& dialog) {
  if (dialog.turns.size() > kMaxTurns) {
    throw Error(ErrorCode::kInvalidArgument,
                "dialog " + dialog.id + " exceeds " + std::to_string(kMaxTurns) + " turns");
  }
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    if (dialog.turns[i].index != i + 1) {
      throw Error(ErrorCode::kOutOfOrderTurn,
                  "dialog " + dialog.id + ": expected turn " + std::to_string(i + 1) + ", got " +
                      std::to_string(dialog.turns[i].index));
    }
  }
}

std::size_t count_turns(const std::vector<Dialog>& dialogs) {
  std::size_t n = 0;
  for (const auto& d : dialogs) n += d.turns.size();
  return n;
}

Utterance ApiCall::to_utterance() const {
  std::vector<std::string> toks{std::string(kApiCallMarker)};
  toks.insert(toks.end(), args.begin(), args.end());
  return Utterance(std::move(toks));
}

std::optional<ApiCall> ApiCall::parse(const Utterance& utterance) {
  if (utterance.tokens.empty() || utterance.tokens.front() != kApiCallMarker) return std::nullopt;
  return ApiCall{{utterance.tokens.begin() + 1, utterance.tokens.end()}};
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  for (const char* r : kReserved) {
    token_to_id_.emplace(r, static_cast<std::int32_t>(id_to_token_.size()));
    id_to_token_.emplace_back(r);
  }
  for (const auto& t : tokens) {
    if (token_to_id_.count(t)) continue;
    token_to_id_.emplace(t, static_cast<std::int32_t>(id_to_token_.size()));
    id_to_token_.push_back(t);
  }
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "token id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<std::int32_t> Vocabulary::encode(const Utterance& utterance) const {
  return encode(utterance.tokens);
}

std::vector<std::int32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(const std::vector<std::int32_t>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto i : ids) out.push_back(token(i));
  return out;
}

Vocabulary build_vocabulary(const std::vector<Dialog>& train_dialogs, std::size_t min_count) {
  if (train_dialogs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build a vocabulary from no dialogs");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& d : train_dialogs) {
    for (const auto& t : d.turns) {
      for (const auto& tok : t.user.tokens) ++counts[tok];
      for (const auto& tok : t.agent.tokens) ++counts[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> kept;
  for (const auto& [tok, n] : ranked) {
    if (n >= min_count) kept.push_back(tok);
  }
  return Vocabulary(kept);
}

// ---------------------------------------------------------------------------

CorpusSplit split_corpus(const std::vector<Dialog>& dialogs, std::int64_t seed) {
  const std::size_t n = dialogs.size();
  if (n < 10) {
    throw Error(ErrorCode::kTooFewDialogs,
                "need at least 10 dialogs to split, got " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const auto n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(0.08 * static_cast<double>(n)));
  const std::size_t n_train = n - n_test - n_val;

  CorpusSplit split;
  for (std::size_t k = 0; k < n; ++k) {
    const Dialog& d = dialogs[order[k]];
    if (k < n_train) {
      split.train.push_back(d);
    } else if (k < n_train + n_val) {
      split.validation.push_back(d);
    } else {
      split.test.push_back(d);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------

std::string dialog_id(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dialog-%06zu", ordinal);
  return buf;
}

std::vector<Dialog> parse_babi_text(std::istream& in) {
  std::vector<Dialog> dialogs;
  Dialog current;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (current.turns.empty()) return;
    current.id = dialog_id(dialogs.size() + 1);
    dialogs.push_back(std::move(current));
    current = Dialog{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "missing tab separator");
    std::string_view head(line.data(), tab);
    std::string_view agent_text(line.data() + tab + 1, line.size() - tab - 1);

    head = trim(head);
    std::size_t digits = 0;
    while (digits < head.size() && std::isdigit(static_cast<unsigned char>(head[digits]))) ++digits;
    if (digits == 0 || digits > 9) throw ParseError(line_no, "missing turn id");
    if (digits < head.size() && !is_space(head[digits])) {
      throw ParseError(line_no, "turn id must be followed by a space");
    }
    const auto turn_id = static_cast<std::uint32_t>(std::stoul(std::string(head.substr(0, digits))));
    const std::string_view user_text = trim(head.substr(digits));
    if (user_text.empty()) throw ParseError(line_no, "empty user utterance");
    if (trim(agent_text).empty()) throw ParseError(line_no, "empty agent utterance");
    if (turn_id != current.turns.size() + 1) {
      throw Error(ErrorCode::kOutOfOrderTurn,
                  "line " + std::to_string(line_no) + ": expected turn " +
                      std::to_string(current.turns.size() + 1) + ", got " +
                      std::to_string(turn_id));
    }
    current.turns.push_back(
        Turn{Utterance::from_text(user_text), Utterance::from_text(agent_text), turn_id});
  }
  flush();
  return dialogs;
}

void write_babi_text(std::ostream& out, const std::vector<Dialog>& dialogs) {
  for (std::size_t d = 0; d < dialogs.size(); ++d) {
    if (d) out << '\n';
    for (const auto& t : dialogs[d].turns) {
      out << t.index << ' ' << t.user.text() << '\t' << t.agent.text() << '\n';
    }
  }
}

std::vector<Dialog> parse_jsonl(std::istream& in) {
  std::vector<Dialog> dialogs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("turns") || !j["turns"].is_array()) {
      throw ParseError(line_no, "expected an object with id and turns");
    }
    Dialog d;
    d.id = j["id"].get<std::string>();
    std::uint32_t index = 1;
    for (const auto& t : j["turns"]) {
      if (!t.contains("user") || !t.contains("agent")) {
        throw ParseError(line_no, "turn without user/agent fields");
      }
      d.turns.push_back(Turn{Utterance::from_text(t["user"].get<std::string>()),
                             Utterance::from_text(t["agent"].get<std::string>()), index++});
    }
    validate_dialog(d);
    dialogs.push_back(std::move(d));
  }
  return dialogs;
}

void write_jsonl(std::ostream& out, const std::vector<Dialog>& dialogs) {
  for (const auto& d : dialogs) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : d.turns) {
      turns.push_back({{"user", t.user.text()}, {"agent", t.agent.text()}});
    }
    nlohmann::json j{{"id", d.id}, {"turns", std::move(turns)}};
    out << j.dump() << '\n';
  }
}

std::vector<Dialog> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus: " + path);
  const bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
  auto dialogs = jsonl ? parse_jsonl(in) : parse_babi_text(in);
  if (dialogs.empty()) throw Error(ErrorCode::kEmptyInput, "corpus has no dialogs: " + path);
  return dialogs;
}

}  // namespace dialogforge::corpus
