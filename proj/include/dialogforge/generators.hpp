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
#include <cstdint>
#include <string>
#include <vector>

#include "dialogforge/corpus.hpp"

namespace dialogforge::corpus {

/// Restaurant slot values, serialized into the api_call in this order.
struct RestaurantSlots {
  std::string cuisine;
  std::string location;
  std::string party_size;
  std::string price;

  ApiCall to_api_call() const { return ApiCall{{cuisine, location, party_size, price}}; }
};

const std::vector<std::string>& restaurant_cuisines();
const std::vector<std::string>& restaurant_locations();
const std::vector<std::string>& restaurant_party_sizes();
const std::vector<std::string>& restaurant_prices();

/// Reservation dialogs: greeting, request with a random subset of the four
/// slots, one question per missing slot, a lookup announcement, a single
/// api_call turn, then closing turns.
std::vector<Dialog> generate_restaurant_corpus(std::size_t n_dialogs, std::int64_t seed);

/// Scripted membership-cancellation support dialogs: greeting, empathy,
/// cancellation with one "api_call cancel_refund" turn, then closing. User
/// turns are written noisily (typos, lingo, raw amounts and names) and run
/// through normalize_utterance. Users sometimes send a burst of messages
/// early on, which the agent answers with <SILENCE>.
std::vector<Dialog> generate_support_corpus(std::size_t n_dialogs, std::int64_t seed);

/// The agent script bank used by the support generator. A reply is one
/// opening, followed by one follow-up with probability follow_up_prob.
struct ScriptPhase {
  std::string name;
  std::vector<std::string> openings;
  std::vector<std::string> follow_ups;
  double follow_up_prob = 0.0;

  /// Every reply the phase can produce; at least three per phase except the
  /// single api_call phase.
  std::vector<std::string> paraphrases() const;
};
const std::vector<ScriptPhase>& support_script();

}  // namespace dialogforge::corpus
