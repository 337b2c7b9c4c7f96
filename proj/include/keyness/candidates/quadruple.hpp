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
#include <string>

namespace keyness {

inline constexpr const char* kUnk = "UNK";
inline constexpr const char* kUpperCase = "UPPER-CASE";
inline constexpr const char* kLowerCase = "LOWER-CASE";
inline constexpr const char* kIsStop = "IS-STOP";
inline constexpr const char* kNotStop = "NOT-STOP";

// Word-level symbols fed to the identification network:
// <part-of-speech, case-status, is-stop-word, dependency-type>.
struct Quadruple {
  std::string pos = kUnk;
  std::string case_status = kUnk;
  std::string is_stop = kUnk;
  std::string dep_type = kUnk;

  static Quadruple padding() { return {}; }

  bool is_padding() const {
    return pos == kUnk && case_status == kUnk && is_stop == kUnk && dep_type == kUnk;
  }

  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

inline constexpr std::size_t kQuadrupleLength = 4;
using QuadrupleSeq = std::array<Quadruple, kQuadrupleLength>;

}  // namespace keyness
