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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dialogforge/errors.hpp"
#include "dialogforge/normalize.hpp"
#include "dialogforge/rng.hpp"

using namespace dialogforge;
using namespace dialogforge::corpus;

namespace {

std::vector<std::string> norm(const std::string& raw, const Vocabulary* vocab = nullptr) {
  return normalize_utterance(raw, Lexicon::builtin(), vocab).tokens;
}

using Toks = std::vector<std::string>;

}  // namespace

TEST_CASE("tokenize splits punctuation and apostrophes") {
  CHECK(tokenize("Hello, I'm here!") == Toks{"hello", ",", "i", "'m", "here", "!"});
  CHECK(tokenize("you're  welcome.") == Toks{"you", "'re", "welcome", "."});
  CHECK(tokenize("it was 9.99 or 1,000?") == Toks{"it", "was", "9.99", "or", "1,000", "?"});
  CHECK(tokenize("hi <PERSON>.") == Toks{"hi", "<PERSON>", "."});
}

TEST_CASE("lingo expansion") {
  CHECK(norm("ty") == Toks{"thank", "you"});
  CHECK(norm("thx so much") == Toks{"thanks", "so", "much"});
  CHECK(norm("idk") == Toks{"i", "don", "'t", "know"});
}

TEST_CASE("entity masking") {
  const auto t = norm("charged me $30");
  REQUIRE(t.size() == 3);
  CHECK(t == Toks{"charged", "me", "<MONEY>"});
  CHECK(norm("it was 12.99 dollars") == Toks{"it", "was", "<MONEY>"});
  CHECK(norm("it was $ 5") == Toks{"it", "was", "<MONEY>"});
  CHECK(norm("Hi I am Sarah") == Toks{"hi", "i", "am", "<PERSON>"});
  CHECK(norm("my name is zebulon") == Toks{"my", "name", "is", "<PERSON>"});
  CHECK(norm("my StreamFlix account") == Toks{"my", "<masked>", "account"});
}

TEST_CASE("spell correction against a vocabulary hint") {
  const Vocabulary v({"hello", "membership", "cancel", "cancer"});
  CHECK(norm("hello", &v) == Toks{"hello"});
  CHECK(norm("membrship", &v) == Toks{"membership"});
  // two candidates at distance 1: left alone
  CHECK(norm("cancem", &v) == Toks{"cancem"});
  // no hint, no correction
  CHECK(norm("membrship") == Toks{"membrship"});
  // short tokens are never corrected
  const Vocabulary w({"hi"});
  CHECK(norm("hx", &w) == Toks{"hx"});
}

TEST_CASE("edit distance") {
  CHECK(edit_distance("kitten", "sitting", 10) == 3);
  CHECK(edit_distance("", "abc", 10) == 3);
  CHECK(edit_distance("same", "same", 0) == 0);
  CHECK(edit_distance("abcdef", "uvwxyz", 1) > 1);
}

TEST_CASE("blank input is rejected") {
  try {
    norm("  \t ");
    FAIL("expected EmptyUtterance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyUtterance);
  }
}

TEST_CASE("normalization is idempotent") {
  const Vocabulary v({"please", "cancel", "membership", "refund", "thank", "you", "charged"});
  const std::vector<std::string> words = {
      "ty",     "Please", "cancel", "membrship", "$30",     "20", "dollars", "Sarah",
      "lol",    "it's",   "ok",     "refund!",   "charged", "my", "name",    "is",
      "Bob,",   "9.99",   "u",      "primebox",  "?",       "I'M"};
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::string raw;
    const auto n = 1 + rng.uniform(8);
    for (std::size_t i = 0; i < n; ++i) raw += rng.pick(words) + " ";
    const auto once = normalize_utterance(raw, Lexicon::builtin(), &v);
    const auto twice = normalize_utterance(once.text(), Lexicon::builtin(), &v);
    CHECK_MESSAGE(once == twice, raw);
  }
}

TEST_CASE("shipped config files match the compiled-in defaults") {
  const std::filesystem::path dir = DF_SOURCE_DIR "/config";
  const auto lex = Lexicon::load((dir / "lingo.tsv").string());
  CHECK(lex.entries() == Lexicon::builtin().entries());
  auto load_terms = [&](const char* name) {
    std::ifstream in(dir / name);
    REQUIRE(in);
    return MaskConfig::parse_terms(in);
  };
  CHECK(load_terms("person_names.txt") == MaskConfig::builtin().person_names);
  CHECK(load_terms("brands.txt") == MaskConfig::builtin().brand_terms);
}

TEST_CASE("lexicon parse errors carry line numbers") {
  std::stringstream ss("# comment\nty\tthank you\nbroken line\n");
  try {
    Lexicon::parse(ss);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
