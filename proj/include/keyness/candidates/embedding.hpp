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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "keyness/error.hpp"
#include "keyness/text.hpp"

namespace keyness {

// Maps a term key to a fixed-dimension vector.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  // nullopt when the provider has no vector for `key`.
  virtual std::optional<std::vector<double>> embed(std::string_view key) const = 0;
};

// Hashed bag of character trigrams (with word-boundary markers) and whole
// lemmas, L2-normalized. Needs no external model.
class LexicalEmbedder final : public Embedder {
 public:
  explicit LexicalEmbedder(std::size_t dim = 256, double lemma_weight = 2.0)
      : dim_(dim), lemma_weight_(lemma_weight) {}

  std::size_t dimension() const override { return dim_; }

  std::optional<std::vector<double>> embed(std::string_view key) const override {
    std::vector<double> v(dim_, 0.0);
    const auto bump = [&](std::string_view feature, double w) {
      const auto h = text::fnv1a(feature);
      v[h % dim_] += (h >> 63) ? -w : w;
    };
    for (const auto& word : text::split_ws(key)) {
      bump("w:" + word, lemma_weight_);
      const std::string padded = "#" + word + "#";
      for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        bump(std::string_view(padded).substr(i, 3), 1.0);
      }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm == 0.0) return std::nullopt;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
  }

 private:
  std::size_t dim_;
  double lemma_weight_;
};

// Precomputed vectors, one per line: `key<TAB>v1 v2 ... vd`. Line 1 holds the
// dimension d.
class TableEmbedder final : public Embedder {
 public:
  static TableEmbedder load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding table '" + path.string() + "'");
    TableEmbedder t;
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing dimension line");
    try {
      t.dim_ = std::stoul(std::string(text::trim(line)));
    } catch (const std::exception&) {
      throw ParseError(path.string(), 1, "dimension must be a positive integer");
    }
    if (t.dim_ == 0) throw ParseError(path.string(), 1, "dimension must be a positive integer");
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(path.string(), lineno, "missing TAB after key");
      std::vector<double> v;
      for (const auto& tok : text::split_ws(std::string_view(line).substr(tab + 1))) {
        try {
          v.push_back(std::stod(tok));
        } catch (const std::exception&) {
          throw ParseError(path.string(), lineno, "non-numeric vector entry '" + tok + "'");
        }
      }
      if (v.size() != t.dim_) {
        throw ParseError(path.string(), lineno, "expected " + std::to_string(t.dim_) +
                                                    " values, got " + std::to_string(v.size()));
      }
      t.table_[line.substr(0, tab)] = std::move(v);
    }
    return t;
  }

  void insert(std::string key, std::vector<double> v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) throw DataError("embedding dimension mismatch for '" + key + "'");
    table_[std::move(key)] = std::move(v);
  }

  std::size_t dimension() const override { return dim_; }

  std::optional<std::vector<double>> embed(std::string_view key) const override {
    const auto it = table_.find(std::string(key));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace keyness
