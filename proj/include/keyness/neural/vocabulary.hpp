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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "keyness/error.hpp"

namespace keyness::nn {

// Closed symbol table; index 0 is the UNK/padding row.
class Vocabulary {
 public:
  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  explicit Vocabulary(const std::vector<std::string>& symbols) {
    add("UNK");
    for (const auto& s : symbols) add(s);
  }

  int id(std::string_view symbol) const {
    const auto it = index_.find(std::string(symbol));
    return it == index_.end() ? 0 : it->second;
  }

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  nlohmann::json to_json() const { return symbols_; }

  static Vocabulary from_json(const nlohmann::json& j) {
    const auto syms = j.get<std::vector<std::string>>();
    if (syms.empty() || syms.front() != "UNK") throw FormatError("vocabulary must start with UNK");
    return Vocabulary(std::vector<std::string>(syms.begin() + 1, syms.end()));
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.symbols_ == b.symbols_;
  }

 private:
  void add(const std::string& s) {
    if (index_.emplace(s, static_cast<int>(symbols_.size())).second) symbols_.push_back(s);
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// Penn Treebank tags plus Universal POS tags.
inline Vocabulary default_pos_vocabulary() {
  return Vocabulary({"NN",    "NNS",   "NNP",   "NNPS", "JJ",    "JJR",   "JJS",  "VB",
                     "VBD",   "VBG",   "VBN",   "VBP",  "VBZ",   "RB",    "RBR",  "RBS",
                     "DT",    "IN",    "CC",    "CD",   "PRP",   "PRP$",  "WDT",  "WP",
                     "WP$",   "WRB",   "MD",    "TO",   "RP",    "EX",    "FW",   "POS",
                     "PDT",   "UH",    "SYM",   "LS",   "HYPH",  "NFP",   "ADD",  "AFX",
                     "XX",    ",",     ".",     ":",    "``",    "''",    "-LRB-", "-RRB-",
                     "$",     "#",     "NOUN",  "PROPN", "ADJ",  "VERB",  "ADV",  "ADP",
                     "DET",   "PRON",  "AUX",   "CCONJ", "SCONJ", "NUM",  "PART", "INTJ",
                     "PUNCT", "X"});
}

inline Vocabulary default_case_vocabulary() { return Vocabulary({"UPPER-CASE", "LOWER-CASE"}); }

inline Vocabulary default_stop_vocabulary() { return Vocabulary({"IS-STOP", "NOT-STOP"}); }

// ClearNLP (spaCy English) labels plus Universal Dependencies relations.
inline Vocabulary default_dep_vocabulary() {
  return Vocabulary({"ROOT",      "acl",        "acomp",      "advcl",     "advmod",   "agent",
                     "amod",      "appos",      "attr",       "aux",       "auxpass",  "case",
                     "cc",        "ccomp",      "compound",   "conj",      "csubj",    "csubjpass",
                     "dative",    "dep",        "det",        "dobj",      "expl",     "intj",
                     "mark",      "meta",       "neg",        "nmod",      "npadvmod", "nsubj",
                     "nsubjpass", "nummod",     "oprd",       "parataxis", "pcomp",    "pobj",
                     "poss",      "preconj",    "predet",     "prep",      "prt",      "punct",
                     "quantmod",  "relcl",      "xcomp",      "root",      "obj",      "iobj",
                     "obl",       "fixed",      "flat",       "goeswith",  "list",     "orphan",
                     "cop",       "clf",        "discourse",  "vocative",  "nsubj:pass",
                     "aux:pass",  "compound:prt", "obl:tmod", "nmod:poss"});
}

}  // namespace keyness::nn
