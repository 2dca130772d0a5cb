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

#include "dialogforge/generators.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dialogforge/normalize.hpp"
#include "dialogforge/rng.hpp"

namespace dialogforge::corpus {

namespace {

std::string fill(std::string templ, const std::string& key, const std::string& value) {
  for (auto pos = templ.find(key); pos != std::string::npos; pos = templ.find(key, pos + value.size())) {
    templ.replace(pos, key.size(), value);
  }
  return templ;
}

Turn make_turn(const std::string& user, const std::string& agent, std::size_t index) {
  return Turn{Utterance::from_text(user), Utterance::from_text(agent),
              static_cast<std::uint32_t>(index)};
}

// ---------------------------------------------------------------------------
// Restaurant domain

enum Slot { kCuisine = 0, kLocation, kPartySize, kPrice, kNumSlots };

const std::vector<std::string> kGreetings = {"hi", "hello", "good morning", "hey there",
                                             "hello there"};
const std::vector<std::string> kRequests = {
    "can you book a table", "i 'd like to book a table", "may i have a table",
    "can you make a restaurant reservation", "i would like to make a reservation"};
// Phrases appended to a request when the slot is volunteered up front.
const std::array<std::string, kNumSlots> kRequestSlotPhrase = {
    " with {v} food", " in {v}", " for {v} people", " in a {v} price range"};
const std::array<std::vector<std::string>, kNumSlots> kSlotAnswers = {{
    {"with {v} food", "i love {v} food", "{v} food please", "i would like {v} cuisine"},
    {"in {v}", "{v} please", "in {v} please", "somewhere in {v}"},
    {"for {v} people please", "we will be {v}", "{v} people", "for {v}"},
    {"i am looking for a {v} restaurant", "in a {v} price range please", "{v} please",
     "something {v}"},
}};
const std::array<std::string, kNumSlots> kSlotQuestions = {
    "any preference on a type of cuisine", "where should it be",
    "how many people would be in your party", "which price range are looking for"};

const std::string kAgentHello = "hello what can i help you with today";
const std::string kAgentOnIt = "i 'm on it";
const std::string kAgentLookup = "ok let me look into some options for you";
const std::string kAgentAnythingElse = "is there anything i can help you with";
const std::string kAgentWelcome = "you 're welcome";
const std::vector<std::string> kUserClosing = {"no thanks", "no thank you", "that 's all thanks",
                                               "no that 's it"};

const std::vector<std::string>& slot_values(int slot) {
  switch (slot) {
    case kCuisine: return restaurant_cuisines();
    case kLocation: return restaurant_locations();
    case kPartySize: return restaurant_party_sizes();
    default: return restaurant_prices();
  }
}

// ---------------------------------------------------------------------------
// Support domain

const std::vector<std::string> kIssueTemplates = {
    "got charged for {brand} membership after trial i did not want to continue",
    "i want to cancel my {brand} membership , please refund me",
    "hi , i found a bill that charged me ${amt}",
    "i did not order {brand} membership",
    "why was i charged {amt} dollars for {brand}",
    "my name is {name} and i was charged for a membership i dont want",
    "hello i was billed ${amt} for a {brand} membership i never signed up for",
    "please cancel my {brand} membership , it renewed without asking me",
};
const std::vector<std::string> kDetailTemplates = {
    "it was ${amt} on my card", "can you help me",
    "i did not know that it would auto renew after the trial",
    "i just want my money back", "the charge was {amt} dollars",
    "i never agreed to this", "i checked my statement and saw it today",
    "this is the second time it happened",
};
const std::vector<std::string> kCancelRequests = {
    "can you cancel it", "please cancel it and refund me", "i want a refund pls",
    "just cancel it plz",
};
const std::vector<std::string> kThanks = {"thank you", "ty", "thx so much", "thank you very much",
                                          "ty so much", "thanks a lot"};
const std::vector<std::string> kAfterConfirm = {"okay , good job", "great thanks",
                                                "very appreciated", "thank you so much", "k thx"};
const std::vector<std::string> kNothingElse = {"no i 'm good", "no more , thanks",
                                               "nope that 's all", "no thank you", "no , im good"};
const std::vector<std::string> kAmounts = {"30", "9.99", "12.99", "119", "79", "14.50", "99"};

// Agent replies are an opening sentence, optionally followed by a second
// one. Earlier entries are more common (weights 1, 1/2, 1/3, ...), so the
// bank has a long tail of rarely seen replies.
const std::vector<ScriptPhase> kScript = {
    {"greeting",
     {"hello , my name is <PERSON> .", "hello there , this is <PERSON> .", "hello <PERSON> here .",
      "hello , <PERSON> here from the membership team .",
      "hello , my name is <PERSON> and i 'll be assisting you .",
      "hello and welcome , my name is <PERSON> ."},
     {"i 'm here to help you today .", "thank you for reaching out to us today .",
      "i 'll be glad to help you with your account today .",
      "i 'm happy to help you with your membership today .", "i hope you are doing well today .",
      "how are you doing today ?"},
     0.85},
    {"member_thanks",
     {"thank you for being a <masked> member .", "thanks for being a valued <masked> member .",
      "i appreciate you being a loyal <masked> member .",
      "thank you for being with <masked> for so long .",
      "we truly value you as a <masked> member ."},
     {"it means a lot to us .", "we are glad to have you with us ."},
     0.3},
    {"empathy",
     {"i 'm sorry to hear that you were charged with our membership .",
      "i 'm sorry for the trouble with the membership charge .",
      "please do not worry , i 'll be completely helping you with this .",
      "i understand how frustrating an unexpected charge can be .",
      "i 'm sorry if any inconvenience happened to you .",
      "i can see why you would be upset about this charge .",
      "i 'm really sorry that this happened to you ."},
     {"no worries i 'll do my best .", "i 'll take care of this for you .",
      "let me help you with this .", "i will do everything i can to fix this .",
      "we will get this sorted out together ."},
     0.6},
    {"check",
     {"please allow me a minute to check this for you .",
      "give me a moment while i pull up your account .",
      "let me take a quick look at your account .", "thanks for the details .",
      "one moment please while i review the charges on your account .",
      "let me check the billing history on your account ."},
     {"please allow me a minute to look into this .", "i 'll be right back with you .",
      "thank you for your patience ."},
     0.4},
    {"welcome",
     {"you 're welcome .", "you 're most welcome .", "my pleasure .", "no problem at all .",
      "anytime .", "glad i could help ."},
     {"happy to help ."},
     0.2},
    {"action",
     {"i will now cancel your membership and refund the charge .",
      "i 'm going to cancel the membership and issue a full refund .",
      "i can cancel your membership and refund you right away .",
      "i will cancel the membership now and process your refund .",
      "i have gone ahead and started the cancellation of your membership .",
      "i can see the charge , so i 'll cancel the membership and refund it ."},
     {"you will not be charged again .", "this will only take a moment .",
      "please give me a few seconds ."},
     0.4},
    {"api", {"api_call cancel_refund"}, {}, 0.0},
    {"confirm",
     {"i have successfully issued the refund for you and i will make sure this does not happen "
      "in future again .",
      "your membership has been canceled and the refund is on its way .",
      "the refund is processed and your membership is now canceled .",
      "i hope my actions helped you out today .",
      "all done , the membership is canceled and the money is refunded .",
      "you should see the refund on your card within three to five business days ."},
     {"you will receive a confirmation email shortly .",
      "the refund may take a few days to show up .", "you will not see this charge again ."},
     0.5},
    {"anything_else",
     {"is there anything else i can help you with today ?",
      "is there anything else i can assist you with ?",
      "in the meantime , i want to make sure i have covered all of your concerns , please let me "
      "know .",
      "is there something else i can do for you ?",
      "do you have any other questions for me today ?"},
     {},
     0.0},
    {"closing",
     {"thank you for contacting <masked> .", "it was my pleasure assisting you today .",
      "thank you for contacting <masked> , have a great day .",
      "it was my pleasure assisting a valued customer like you today .",
      "thanks for chatting with us today ."},
     {"do have a lovely time .", "have a wonderful day .", "take care ."},
     0.5},
};

const ScriptPhase& phase(const std::string& name) {
  for (const auto& p : kScript) {
    if (p.name == name) return p;
  }
  throw std::logic_error("unknown script phase " + name);
}

// Vocabulary of every clean word the support user templates can produce;
// typos introduced by the noise model are corrected against it.
const Vocabulary& support_user_vocab() {
  static const Vocabulary vocab = [] {
    std::set<std::string> words;
    auto add = [&](const std::vector<std::string>& templates) {
      for (const auto& t : templates) {
        std::string clean = fill(fill(fill(t, "{brand}", "x"), "{amt}", "1"), "{name}", "x");
        for (const auto& tok : tokenize(clean)) words.insert(tok);
      }
    };
    add(kIssueTemplates);
    add(kDetailTemplates);
    add(kCancelRequests);
    add(kThanks);
    add(kAfterConfirm);
    add(kNothingElse);
    // Lingo expansions are legitimate corrections targets as well.
    for (const auto* w : {"thank", "you", "thanks", "please", "okay", "don", "'t", "i", "'m"}) {
      words.insert(w);
    }
    return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
  }();
  return vocab;
}

// Introduces typos into longer words: one interior deletion or adjacent swap.
std::string add_noise(const std::string& text, Rng& rng, double typo_rate) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    std::string word = text.substr(i, j - i);
    const bool plain = word.size() >= 6 &&
                       std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (plain && rng.bernoulli(typo_rate)) {
      const std::size_t pos = 1 + rng.uniform(word.size() - 2);
      if (rng.bernoulli(0.5)) {
        word.erase(pos, 1);
      } else {
        std::swap(word[pos], word[pos + 1 < word.size() ? pos + 1 : pos - 1]);
      }
    }
    out += word;
    if (j < text.size()) out += ' ';
    i = j + 1;
  }
  return out;
}

// Index in [0, n) with weight 1 / (i + 1).
std::size_t zipf_index(Rng& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 1);
  double u = rng.unit() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= 1.0 / static_cast<double>(i + 1);
    if (u < 0.0) return i;
  }
  return n - 1;
}

}  // namespace

const std::vector<std::string>& restaurant_cuisines() {
  static const std::vector<std::string> v = {"british", "cantonese", "french", "indian",
                                             "italian", "japanese", "korean", "spanish",
                                             "thai", "vietnamese"};
  return v;
}

const std::vector<std::string>& restaurant_locations() {
  static const std::vector<std::string> v = {"bangkok", "beijing", "bombay", "hanoi", "london",
                                             "madrid", "paris", "rome", "seoul", "tokyo"};
  return v;
}

const std::vector<std::string>& restaurant_party_sizes() {
  static const std::vector<std::string> v = {"two", "four", "six", "eight"};
  return v;
}

const std::vector<std::string>& restaurant_prices() {
  static const std::vector<std::string> v = {"cheap", "moderate", "expensive"};
  return v;
}

std::vector<Dialog> generate_restaurant_corpus(std::size_t n_dialogs, std::int64_t seed) {
  Rng rng(seed);
  std::vector<Dialog> dialogs;
  dialogs.reserve(n_dialogs);

  for (std::size_t d = 0; d < n_dialogs; ++d) {
    std::array<std::string, kNumSlots> value;
    for (int s = 0; s < kNumSlots; ++s) value[s] = rng.pick(slot_values(s));
    std::array<bool, kNumSlots> volunteered{};
    for (int s = 0; s < kNumSlots; ++s) volunteered[s] = rng.bernoulli(0.4);

    std::vector<int> missing;
    for (int s = 0; s < kNumSlots; ++s) {
      if (!volunteered[s]) missing.push_back(s);
    }

    Dialog dialog;
    dialog.id = dialog_id(d + 1);
    auto add = [&](const std::string& user, const std::string& agent) {
      dialog.turns.push_back(make_turn(user, agent, dialog.turns.size() + 1));
    };

    add(rng.pick(kGreetings), kAgentHello);

    std::string request = rng.pick(kRequests);
    for (int s = 0; s < kNumSlots; ++s) {
      if (volunteered[s]) request += fill(kRequestSlotPhrase[s], "{v}", value[s]);
    }
    add(request, kAgentOnIt);

    // Each user turn is answered with the next missing-slot question; the
    // last one is answered with the lookup announcement.
    std::string user = std::string(kSilence);
    for (int s : missing) {
      add(user, kSlotQuestions[s]);
      user = fill(rng.pick(kSlotAnswers[s]), "{v}", value[s]);
    }
    add(user, kAgentLookup);

    const RestaurantSlots slots{value[kCuisine], value[kLocation], value[kPartySize], value[kPrice]};
    add(std::string(kSilence), slots.to_api_call().text());
    add(std::string(kSilence), kAgentAnythingElse);
    add(rng.pick(kUserClosing), kAgentWelcome);

    dialogs.push_back(std::move(dialog));
  }
  return dialogs;
}

const std::vector<ScriptPhase>& support_script() { return kScript; }

std::vector<std::string> ScriptPhase::paraphrases() const {
  std::vector<std::string> out;
  for (const auto& o : openings) {
    if (follow_up_prob < 1.0) out.push_back(o);
    for (const auto& f : follow_ups) out.push_back(o + " " + f);
  }
  return out;
}

std::vector<Dialog> generate_support_corpus(std::size_t n_dialogs, std::int64_t seed) {
  Rng rng(seed);
  const Lexicon& lexicon = Lexicon::builtin();
  const Vocabulary& user_vocab = support_user_vocab();
  const auto& names = MaskConfig::builtin().person_names;
  const auto& brands = MaskConfig::builtin().brand_terms;
  const std::vector<std::string> name_list(names.begin(), names.end());
  const std::vector<std::string> brand_list(brands.begin(), brands.end());

  std::vector<Dialog> dialogs;
  dialogs.reserve(n_dialogs);

  for (std::size_t d = 0; d < n_dialogs; ++d) {
    Dialog dialog;
    dialog.id = dialog_id(d + 1);

    auto user_text = [&](const std::vector<std::string>& templates) {
      std::string raw = rng.pick(templates);
      raw = fill(raw, "{brand}", rng.pick(brand_list));
      raw = fill(raw, "{amt}", rng.pick(kAmounts));
      raw = fill(raw, "{name}", rng.pick(name_list));
      raw = add_noise(raw, rng, 0.15);
      return normalize_utterance(raw, lexicon, &user_vocab);
    };
    auto push = [&](Utterance user, Utterance agent) {
      dialog.turns.push_back(Turn{std::move(user), std::move(agent),
                                  static_cast<std::uint32_t>(dialog.turns.size() + 1)});
    };
    auto add = [&](Utterance user, const std::string& phase_name) {
      const ScriptPhase& ph = phase(phase_name);
      std::string reply = ph.openings[zipf_index(rng, ph.openings.size())];
      if (!ph.follow_ups.empty() && rng.bernoulli(ph.follow_up_prob)) {
        reply += " " + ph.follow_ups[zipf_index(rng, ph.follow_ups.size())];
      }
      push(std::move(user), Utterance::from_text(reply));
    };
    auto silence_or = [&](double p_text, const std::vector<std::string>& templates) {
      return rng.bernoulli(p_text) ? user_text(templates) : Utterance::silence();
    };

    add(user_text(kIssueTemplates), "greeting");
    // the customer keeps typing before the agent answers
    bool burst = rng.bernoulli(0.35);
    if (burst) {
      const std::size_t k = 1 + rng.uniform(2);
      for (std::size_t i = 0; i < k; ++i) push(user_text(kDetailTemplates), Utterance::silence());
    }
    if (rng.bernoulli(0.8)) {
      add(burst ? user_text(kDetailTemplates) : Utterance::silence(), "member_thanks");
      burst = false;
    }
    add(burst ? user_text(kDetailTemplates) : silence_or(0.3, kDetailTemplates), "empathy");
    if (rng.bernoulli(0.6)) add(silence_or(0.5, kDetailTemplates), "check");
    if (rng.bernoulli(0.4)) add(user_text(kThanks), "welcome");
    add(silence_or(0.35, kCancelRequests), "action");
    add(Utterance::silence(), "api");
    add(silence_or(0.4, kThanks), "confirm");
    if (rng.bernoulli(0.5)) add(user_text(kAfterConfirm), "welcome");
    add(Utterance::silence(), "anything_else");
    add(user_text(kNothingElse), "closing");

    dialogs.push_back(std::move(dialog));
  }
  return dialogs;
}

}  // namespace dialogforge::corpus
