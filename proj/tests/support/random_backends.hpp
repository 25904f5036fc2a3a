// Copyright 2026 The SumGD Engine Authors.
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

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumgd/mock_backends.hpp"

namespace sumgd::testing {

// Deterministic scripted backends with random rule tables over a small
// caption vocabulary. Some rules look far back into the history so that
// contexts which differ only before the current sentence can disagree.
inline nlohmann::json random_scripted_spec(std::uint64_t seed) {
  static const std::vector<std::string> kWords = {
      "a",   "the",   "dog",  "cat", "ball", "table", "car", "frisbee", "red",
      "small", "large", "two", "is",  "on",   "near",  "sits", "and",   "."};
  static const std::vector<std::string> kNouns = {"dog", "cat", "ball", "table",
                                                  "car", "frisbee"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& from) {
    return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
  };
  auto weight = [&] {
    // Quarter steps make exact ties (and so the tie-break) reachable.
    return 0.25 * static_cast<double>(std::uniform_int_distribution<int>(1, 8)(rng));
  };
  auto random_table = [&](bool allow_eos) {
    nlohmann::json t = nlohmann::json::object();
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < n; ++i) t[pick(kWords)] = weight();
    if (allow_eos && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      t["</s>"] = weight();
    }
    double total = 0.0;
    for (auto& [k, v] : t.items()) total += v.get<double>();
    for (auto& [k, v] : t.items()) v = v.get<double>() / total;
    return t;
  };

  nlohmann::json rules = nlohmann::json::array();
  rules.push_back({{"pattern", {{"max_history", 0}}}, {"distribution", random_table(false)}});
  const int long_range = std::uniform_int_distribution<int>(2, 6)(rng);
  for (int i = 0; i < long_range; ++i) {
    rules.push_back({{"pattern",
                      {{"contains", {pick(kNouns)}},
                       {"suffix", {pick(kWords)}},
                       {"min_history", std::uniform_int_distribution<int>(3, 12)(rng)}}},
                     {"distribution", random_table(true)}});
  }
  for (const auto& w : kWords) {
    rules.push_back({{"pattern", w}, {"distribution", random_table(w == ".")}});
  }
  return {{"rules", rules}, {"default", {{"</s>", 1.0}}}};
}

inline ScriptedBackend random_scripted_backend(std::uint64_t seed) {
  return ScriptedBackend::from_json(random_scripted_spec(seed));
}

}  // namespace sumgd::testing
