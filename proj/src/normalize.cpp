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

#include "dialogforge/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dialogforge/errors.hpp"

namespace dialogforge::corpus {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_placeholder(std::string_view tok) {
  if (tok.size() < 3 || tok.front() != '<' || tok.back() != '>') return false;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    if (!is_alpha(tok[i]) && tok[i] != '_') return false;
  }
  return true;
}

// Length of a placeholder starting at raw[pos], or 0.
std::size_t placeholder_at(std::string_view raw, std::size_t pos) {
  if (raw[pos] != '<') return 0;
  std::size_t j = pos + 1;
  while (j < raw.size() && (is_alpha(raw[j]) || raw[j] == '_')) ++j;
  if (j == pos + 1 || j >= raw.size() || raw[j] != '>') return 0;
  return j + 1 - pos;
}

bool is_number(std::string_view tok) {
  if (tok.empty() || !is_digit(tok.front()) || !is_digit(tok.back())) return false;
  return std::all_of(tok.begin(), tok.end(), [](char c) { return is_digit(c) || c == '.' || c == ','; });
}

bool is_money_token(std::string_view tok) {
  if (tok.size() >= 2 && tok.front() == '$') return is_number(tok.substr(1));
  if (tok.size() >= 2 && tok.back() == '$') return is_number(tok.substr(0, tok.size() - 1));
  return false;
}

bool is_currency_word(std::string_view tok) {
  return tok == "dollars" || tok == "dollar" || tok == "usd" || tok == "bucks";
}

bool is_word(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return is_alpha(c); });
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> mask_entities(const std::vector<std::string>& in, const MaskConfig& masks) {
  std::vector<std::string> out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::string& tok = in[i];
    if (is_placeholder(tok)) {
      out.push_back(tok);
    } else if (is_money_token(tok)) {
      out.emplace_back(kMoneyMask);
    } else if (tok == "$" && i + 1 < in.size() && is_number(in[i + 1])) {
      out.emplace_back(kMoneyMask);
      ++i;
    } else if (is_number(tok) && i + 1 < in.size() && is_currency_word(in[i + 1])) {
      out.emplace_back(kMoneyMask);
      ++i;
    } else if (masks.person_names.count(tok) ||
               (i >= 2 && in[i - 2] == "name" && in[i - 1] == "is" && is_word(tok) &&
                !masks.brand_terms.count(tok))) {
      out.emplace_back(kPersonMask);
    } else if (masks.brand_terms.count(tok)) {
      out.emplace_back(kBrandMask);
    } else {
      out.push_back(tok);
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Lexicon::Lexicon(std::map<std::string, std::vector<std::string>> entries) {
  for (auto& [k, v] : entries) entries_.emplace(k, std::move(v));
}

Lexicon Lexicon::parse(std::istream& in) {
  std::map<std::string, std::vector<std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "lexicon line missing tab");
    auto key = split_ws(line.substr(0, tab));
    auto expansion = split_ws(line.substr(tab + 1));
    if (key.size() != 1 || expansion.empty()) {
      throw ParseError(line_no, "lexicon entry must map one shortform to a non-empty expansion");
    }
    entries[key.front()] = std::move(expansion);
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon: " + path);
  return parse(in);
}

const Lexicon& Lexicon::builtin() {
  // Mirrors config/lingo.tsv.
  static const Lexicon lexicon({
      {"ty", {"thank", "you"}},
      {"thx", {"thanks"}},
      {"tnx", {"thanks"}},
      {"lol", {"haha"}},
      {"pls", {"please"}},
      {"plz", {"please"}},
      {"u", {"you"}},
      {"ur", {"your"}},
      {"r", {"are"}},
      {"im", {"i", "'m"}},
      {"dont", {"don", "'t"}},
      {"cant", {"can", "'t"}},
      {"idk", {"i", "don", "'t", "know"}},
      {"asap", {"as", "soon", "as", "possible"}},
      {"acct", {"account"}},
      {"k", {"okay"}},
      {"ok", {"okay"}},
      {"np", {"no", "problem"}},
      {"b4", {"before"}},
      {"2day", {"today"}},
  });
  return lexicon;
}

const std::vector<std::string>* Lexicon::find(std::string_view shortform) const {
  auto it = entries_.find(shortform);
  return it == entries_.end() ? nullptr : &it->second;
}

std::set<std::string, std::less<>> MaskConfig::parse_terms(std::istream& in) {
  std::set<std::string, std::less<>> terms;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& tok : split_ws(line)) {
      if (tok.front() == '#') break;
      std::transform(tok.begin(), tok.end(), tok.begin(), lower);
      terms.insert(tok);
    }
  }
  return terms;
}

const MaskConfig& MaskConfig::builtin() {
  // Mirrors config/person_names.txt and config/brands.txt.
  static const MaskConfig masks{
      {"alice", "anna", "bob", "carlos", "david", "emma", "james", "john", "linda", "maria",
       "michael", "olivia", "priya", "sarah", "wei"},
      {"streamflix", "shopmax", "primebox", "quickship"},
  };
  return masks;
}

// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (cur.empty()) {
      if (const auto len = placeholder_at(raw, i); len > 0) {
        tokens.emplace_back(raw.substr(i, len));
        i += len - 1;
        continue;
      }
    }
    if (c == '.' || c == ',') {
      const bool inside_number = !cur.empty() && is_digit(cur.back()) && i + 1 < raw.size() &&
                                 is_digit(raw[i + 1]);
      if (inside_number) {
        cur += c;
      } else {
        flush();
        tokens.emplace_back(1, c);
      }
      continue;
    }
    if (c == '?' || c == '!') {
      flush();
      tokens.emplace_back(1, c);
      continue;
    }
    if (c == '\'') {
      flush();
      cur += c;
      continue;
    }
    cur += lower(c);
  }
  flush();
  return tokens;
}

std::size_t edit_distance(std::string_view a, std::string_view b, std::size_t limit) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if ((n > m ? n - m : m - n) > limit) return limit + 1;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  return prev[m];
}

Utterance normalize_utterance(std::string_view raw, const Lexicon& lexicon,
                              const Vocabulary* vocab_hint, const MaskConfig& masks) {
  auto tokens = tokenize(raw);
  if (tokens.empty()) throw Error(ErrorCode::kEmptyUtterance, "empty utterance");

  tokens = mask_entities(tokens, masks);

  std::vector<std::string> expanded;
  expanded.reserve(tokens.size());
  for (auto& tok : tokens) {
    if (const auto* exp = lexicon.find(tok)) {
      expanded.insert(expanded.end(), exp->begin(), exp->end());
    } else {
      expanded.push_back(std::move(tok));
    }
  }

  if (vocab_hint != nullptr) {
    for (auto& tok : expanded) {
      if (!is_word(tok) || tok.size() < 3 || vocab_hint->contains(tok)) continue;
      const std::string* match = nullptr;
      bool ambiguous = false;
      for (const auto& cand : vocab_hint->tokens()) {
        if (!is_word(cand) || lexicon.find(cand) != nullptr) continue;
        if (edit_distance(tok, cand, 1) == 1) {
          if (match != nullptr) {
            ambiguous = true;
            break;
          }
          match = &cand;
        }
      }
      if (match != nullptr && !ambiguous) tok = *match;
    }
  }
  return Utterance(std::move(expanded));
}

}  // namespace dialogforge::corpus
