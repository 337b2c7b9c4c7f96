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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "keyness/corpus/document.hpp"
#include "keyness/error.hpp"

namespace keyness {

// Occurrence counts of every term key (n <= 4) in one document.
inline std::unordered_map<std::string, std::size_t> count_ngrams(const Document& doc) {
  std::unordered_map<std::string, std::size_t> counts;
  for_each_ngram(doc, [&](const Span& sp) { ++counts[term_key(doc, sp)]; });
  return counts;
}

// Reference-corpus statistics. Keys are term keys; maps are ordered so that
// serialization is canonical.
struct CorpusStats {
  static constexpr int kFormatVersion = 1;

  std::uint64_t document_count = 0;
  std::uint64_t ref_size = 0;
  std::map<std::string, std::uint64_t> doc_frequency;
  std::map<std::string, std::uint64_t> ref_frequency;
  std::set<std::string> document_ids;

  std::uint64_t df(const std::string& key) const {
    const auto it = doc_frequency.find(key);
    return it == doc_frequency.end() ? 0 : it->second;
  }
  std::uint64_t ref_count(const std::string& key) const {
    const auto it = ref_frequency.find(key);
    return it == ref_frequency.end() ? 0 : it->second;
  }
  bool contains_document(const std::string& id) const { return document_ids.count(id) != 0; }

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

inline CorpusStats build_corpus_stats(const std::vector<const Document*>& documents) {
  CorpusStats stats;
  for (const Document* doc : documents) {
    ++stats.document_count;
    stats.ref_size += doc->word_count();
    stats.document_ids.insert(doc->id);
    for (const auto& [key, n] : count_ngrams(*doc)) {
      ++stats.doc_frequency[key];
      stats.ref_frequency[key] += n;
    }
  }
  return stats;
}

inline CorpusStats build_corpus_stats(const std::vector<Document>& documents) {
  std::vector<const Document*> ptrs;
  for (const auto& d : documents) ptrs.push_back(&d);
  return build_corpus_stats(ptrs);
}

inline nlohmann::json to_json(const CorpusStats& s) {
  return {{"format_version", CorpusStats::kFormatVersion},
          {"document_count", s.document_count},
          {"ref_size", s.ref_size},
          {"document_ids", s.document_ids},
          {"doc_frequency", s.doc_frequency},
          {"ref_frequency", s.ref_frequency}};
}

inline CorpusStats stats_from_json(const nlohmann::json& j) {
  const int version = j.value("format_version", -1);
  if (version != CorpusStats::kFormatVersion) {
    throw FormatError("stats format_version " + std::to_string(version) + " does not match " +
                      std::to_string(CorpusStats::kFormatVersion));
  }
  CorpusStats s;
  try {
    s.document_count = j.at("document_count").get<std::uint64_t>();
    s.ref_size = j.at("ref_size").get<std::uint64_t>();
    s.document_ids = j.at("document_ids").get<std::set<std::string>>();
    s.doc_frequency = j.at("doc_frequency").get<std::map<std::string, std::uint64_t>>();
    s.ref_frequency = j.at("ref_frequency").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed stats: ") + e.what());
  }
  for (const auto& [key, df] : s.doc_frequency) {
    if (df > s.document_count || s.ref_count(key) < df || s.ref_count(key) > s.ref_size) {
      throw DataError("inconsistent stats for term '" + key + "'");
    }
  }
  return s;
}

inline void save_stats(const CorpusStats& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write stats '" + path.string() + "'");
  out << to_json(s).dump() << '\n';
}

inline CorpusStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stats '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
  return stats_from_json(j);
}

struct NGramCategory {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  bool present = false;
};

// Frequency statistics of the distinct ngrams of each length 1..4.
struct NGramProfile {
  std::array<NGramCategory, kMaxNgram> categories{};

  const NGramCategory& of_length(std::size_t n) const { return categories.at(n - 1); }
};

inline NGramProfile ngram_frequency_profile(
    const std::unordered_map<std::string, std::size_t>& counts) {
  std::array<std::vector<double>, kMaxNgram> freqs;
  for (const auto& [key, n] : counts) {
    const auto len = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
    if (len <= kMaxNgram) freqs[len - 1].push_back(static_cast<double>(n));
  }
  NGramProfile p;
  for (std::size_t i = 0; i < kMaxNgram; ++i) {
    auto& f = freqs[i];
    if (f.empty()) continue;
    // Fixed summation order so the profile does not depend on hash order.
    std::sort(f.begin(), f.end());
    double sum = 0.0;
    for (double v : f) sum += v;
    const double mean = sum / static_cast<double>(f.size());
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    p.categories[i] = {mean, std::sqrt(ss / static_cast<double>(f.size())), true};
  }
  return p;
}

inline NGramProfile ngram_frequency_profile(const Document& doc) {
  return ngram_frequency_profile(count_ngrams(doc));
}

}  // namespace keyness
