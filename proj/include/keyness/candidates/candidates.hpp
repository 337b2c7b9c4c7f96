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

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "keyness/candidates/quadruple.hpp"
#include "keyness/corpus/document.hpp"
#include "keyness/neural/identifier.hpp"

namespace keyness {

struct CandidateTerm {
  std::string key;
  std::size_t length = 1;
  std::vector<Span> occurrences;          // document order
  std::vector<std::string> surface_forms;  // one per occurrence
  std::optional<double> wellformedness;   // omega = W - I, set by scoring

  std::size_t frequency() const { return occurrences.size(); }
  const Span& first() const { return occurrences.front(); }
};

// One CandidateTerm per distinct term key, ordered by first occurrence.
inline std::vector<CandidateTerm> generate_ngrams(const Document& doc) {
  std::vector<CandidateTerm> terms;
  std::unordered_map<std::string, std::size_t> index;
  for_each_ngram(doc, [&](const Span& sp) {
    auto key = term_key(doc, sp);
    auto [it, inserted] = index.emplace(key, terms.size());
    if (inserted) {
      CandidateTerm t;
      t.key = std::move(key);
      t.length = sp.length;
      terms.push_back(std::move(t));
    }
    auto& t = terms[it->second];
    t.occurrences.push_back(sp);
    t.surface_forms.push_back(surface_text(doc.sentences[sp.sentence], sp.start, sp.length));
  });
  return terms;
}

inline Quadruple quadruple_of(const Token& tok) {
  return {tok.pos, tok.case_status == CaseStatus::upper ? kUpperCase : kLowerCase,
          tok.is_stop ? kIsStop : kNotStop, tok.dep_rel};
}

// Quadruples of the term's first occurrence, padded to four entries.
inline QuadrupleSeq quadruples(const CandidateTerm& term, const Document& doc) {
  QuadrupleSeq seq{};
  const auto& sp = term.first();
  const auto& sent = doc.sentences[sp.sentence];
  for (std::size_t i = 0; i < sp.length && i < kQuadrupleLength; ++i) {
    seq[i] = quadruple_of(sent[sp.start + i]);
  }
  return seq;
}

inline double wellformedness(const nn::IdentifierModel& model, const CandidateTerm& term,
                             const Document& doc) {
  return model.forward(quadruples(term, doc)).omega();
}

// Scores every ngram and keeps those with omega > 0. Identical quadruple
// sequences share one forward pass.
inline std::vector<CandidateTerm> score_ngrams(const nn::IdentifierModel& model,
                                               std::vector<CandidateTerm> terms,
                                               const Document& doc) {
  std::map<nn::EncodedQuadruples, double> cache;
  for (auto& t : terms) {
    const auto enc = model.encode(quadruples(t, doc));
    auto it = cache.find(enc);
    if (it == cache.end()) it = cache.emplace(enc, model.forward(enc).omega()).first;
    t.wellformedness = it->second;
  }
  return terms;
}

inline std::vector<CandidateTerm> select_candidates(const nn::IdentifierModel& model,
                                                    const Document& doc) {
  std::vector<CandidateTerm> out;
  for (auto& t : score_ngrams(model, generate_ngrams(doc), doc)) {
    if (*t.wellformedness > 0.0) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace keyness
