// Copyright 2026 The Keyness Authors
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
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

namespace keyness {

// Order of the dependent slots of a keyness pattern. Bump
// kFeatureOrderVersion whenever this list changes; model files record it.
inline constexpr int kFeatureOrderVersion = 1;
inline constexpr std::size_t kDependentFeatures = 17;

inline constexpr std::array<std::string_view, kDependentFeatures> kFeatureNames = {
    "casing",         "position",    "frequency",           "context_diversity",
    "tfidf",          "effect_size", "lexical_specificity", "dispersion",
    "position_rank",  "tfidf_rank",  "lexical_rank",        "single_rank",
    "topic_rank",     "eigenvector", "closeness",           "betweenness",
    "wellformedness"};

enum Feature : std::size_t {
  kCasing,
  kPosition,
  kFrequency,
  kContextDiversity,
  kTfidf,
  kEffectSize,
  kLexicalSpecificity,
  kDispersion,
  kPositionRank,
  kTfidfRank,
  kLexicalRank,
  kSingleRank,
  kTopicRank,
  kEigenvector,
  kCloseness,
  kBetweenness,
  kWellformedness,
};

using DependentVector = std::array<double, kDependentFeatures>;

// Two independent features (sublanguage, term length) plus the dependent
// scores they modulate.
struct KeynessPattern {
  std::string sublanguage = "unknown";
  std::size_t length = 1;
  DependentVector dependent{};

  bool finite() const {
    for (double v : dependent) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const KeynessPattern&, const KeynessPattern&) = default;
};

}  // namespace keyness
