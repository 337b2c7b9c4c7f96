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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keyness/text.hpp"

namespace keyness {

enum class CaseStatus { lower, upper };

struct Token {
  std::string surface;
  std::string lemma;
  std::string pos;  // XPOS when present, otherwise UPOS
  std::string upos;
  std::string dep_rel;
  int head_index = -1;  // 0-based within the sentence; -1 is the root marker
  CaseStatus case_status = CaseStatus::lower;
  bool is_stop = false;
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;

  bool is_punct() const { return upos == "PUNCT" || text::is_punctuation(surface); }
};

using Sentence = std::vector<Token>;

// Closed registry of sublanguage labels. Index 0 is the back-off label.
inline constexpr std::array<std::string_view, 7> kSublanguages = {
    "unknown", "misc-news", "misc-paper", "agriculture", "computer-science", "science", "medicine"};

inline std::optional<std::size_t> sublanguage_index(std::string_view label) {
  for (std::size_t i = 0; i < kSublanguages.size(); ++i) {
    if (kSublanguages[i] == label) return i;
  }
  return std::nullopt;
}

inline bool is_registered_sublanguage(std::string_view label) {
  return sublanguage_index(label).has_value();
}

struct Document {
  std::string id;
  std::string sublanguage = "unknown";
  std::vector<Sentence> sentences;
  std::vector<std::string> gold_keywords;

  std::size_t sentence_count() const { return sentences.size(); }

  std::size_t word_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
};

// A contiguous within-sentence token span.
struct Span {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

inline constexpr std::size_t kMaxNgram = 4;

// Term key: lowercase lemmas joined by single spaces.
inline std::string term_key(const Sentence& sentence, std::size_t start, std::size_t length) {
  std::string key;
  for (std::size_t i = start; i < start + length; ++i) {
    if (i > start) key.push_back(' ');
    key += text::to_lower(sentence[i].lemma);
  }
  return key;
}

inline std::string term_key(const Document& doc, const Span& span) {
  return term_key(doc.sentences[span.sentence], span.start, span.length);
}

inline std::string surface_text(const Sentence& sentence, std::size_t start, std::size_t length) {
  std::string out;
  for (std::size_t i = start; i < start + length; ++i) {
    if (i > start) out.push_back(' ');
    out += sentence[i].surface;
  }
  return out;
}

// Visits every within-sentence ngram (1 <= n <= max_n) that contains no
// punctuation token, in document order: sentence, then start, then length.
template <typename Fn>
void for_each_ngram(const Document& doc, Fn&& fn, std::size_t max_n = kMaxNgram) {
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sent = doc.sentences[s];
    for (std::size_t i = 0; i < sent.size(); ++i) {
      for (std::size_t n = 1; n <= max_n && i + n <= sent.size(); ++n) {
        if (sent[i + n - 1].is_punct()) break;
        fn(Span{s, i, n});
      }
    }
  }
}

// Maps each gold keyword onto the term key it takes in `doc`. A gold keyword
// matches a span when its lowercased words equal either the span's lowercased
// surface words or its lemma key. Keywords absent from the document are dropped.
inline std::vector<std::string> present_gold_keys(const Document& doc) {
  std::vector<std::string> wanted;
  for (const auto& g : doc.gold_keywords) {
    auto words = text::split_ws(text::to_lower(g));
    if (!words.empty() && words.size() <= kMaxNgram) wanted.push_back(text::join(words, " "));
  }
  std::vector<std::optional<std::string>> found(wanted.size());
  for_each_ngram(doc, [&](const Span& sp) {
    const auto& sent = doc.sentences[sp.sentence];
    std::string surf = text::to_lower(surface_text(sent, sp.start, sp.length));
    std::string key;  // computed lazily
    for (std::size_t g = 0; g < wanted.size(); ++g) {
      if (found[g]) continue;
      if (key.empty()) key = term_key(sent, sp.start, sp.length);
      if (wanted[g] == surf || wanted[g] == key) found[g] = key;
    }
  });
  std::vector<std::string> keys;
  for (auto& f : found) {
    if (f && std::find(keys.begin(), keys.end(), *f) == keys.end()) keys.push_back(*f);
  }
  return keys;
}

}  // namespace keyness
