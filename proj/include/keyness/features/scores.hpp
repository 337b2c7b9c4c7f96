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
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "keyness/candidates/candidates.hpp"
#include "keyness/corpus/document.hpp"
#include "keyness/corpus/stats.hpp"
#include "keyness/error.hpp"

namespace keyness {

// Mean share of upper-cased words per occurrence.
inline double casing_score(const CandidateTerm& term, const Document& doc) {
  double total = 0.0;
  for (const auto& sp : term.occurrences) {
    const auto& sent = doc.sentences[sp.sentence];
    std::size_t upper = 0;
    for (std::size_t i = sp.start; i < sp.start + sp.length; ++i) {
      if (sent[i].case_status == CaseStatus::upper) ++upper;
    }
    total += static_cast<double>(upper) / static_cast<double>(sp.length);
  }
  return total / static_cast<double>(term.frequency());
}

// -ln(s / N) with s the 1-based index of the first sentence holding the term.
inline double position_score(const CandidateTerm& term, const Document& doc) {
  const double s = static_cast<double>(term.first().sentence + 1);
  return -std::log(s / static_cast<double>(doc.sentence_count()));
}

inline double frequency_score(const CandidateTerm& term, const NGramProfile& profile) {
  const auto& cat = profile.of_length(term.length);
  const double denom = cat.mean + cat.std;
  if (!(denom > 0.0)) {
    throw DataError("no " + std::to_string(term.length) + "-gram statistics for '" + term.key + "'");
  }
  return static_cast<double>(term.frequency()) / denom;
}

// Distinct/total ratio of the immediate left and right neighbours over all
// occurrences, averaged over the two sides. A side without neighbours adds 0.
inline double context_diversity_score(const CandidateTerm& term, const Document& doc) {
  std::set<std::string> left, right;
  std::size_t n_left = 0, n_right = 0;
  for (const auto& sp : term.occurrences) {
    const auto& sent = doc.sentences[sp.sentence];
    if (sp.start > 0) {
      left.insert(text::to_lower(sent[sp.start - 1].lemma));
      ++n_left;
    }
    if (sp.start + sp.length < sent.size()) {
      right.insert(text::to_lower(sent[sp.start + sp.length].lemma));
      ++n_right;
    }
  }
  const double l = n_left ? static_cast<double>(left.size()) / static_cast<double>(n_left) : 0.0;
  const double r = n_right ? static_cast<double>(right.size()) / static_cast<double>(n_right) : 0.0;
  return (l + r) / 2.0;
}

// ln(|D| / df) with df clamped to at least 1.
inline double inverse_document_frequency(const std::string& key, const CorpusStats& stats) {
  if (stats.document_count == 0) throw DataError("corpus statistics hold no documents");
  const auto df = std::max<std::uint64_t>(stats.df(key), 1);
  return std::log(static_cast<double>(stats.document_count) / static_cast<double>(df));
}

inline double tfidf_score(const CandidateTerm& term, const NGramProfile& profile,
                          const CorpusStats& stats) {
  return frequency_score(term, profile) * inverse_document_frequency(term.key, stats);
}

// Reference counts seen by one document. A document that is not part of the
// reference corpus is added to it.
struct ReferenceCounts {
  std::uint64_t term = 0;  // f_R
  std::uint64_t size = 0;  // N_R
};

inline ReferenceCounts reference_counts(const CandidateTerm& term, const Document& doc,
                                        const CorpusStats& stats) {
  ReferenceCounts rc{stats.ref_count(term.key), stats.ref_size};
  if (!stats.contains_document(doc.id)) {
    rc.term += term.frequency();
    rc.size += doc.word_count();
  }
  return rc;
}

inline double document_probability(const CandidateTerm& term, const Document& doc) {
  return static_cast<double>(term.frequency()) / static_cast<double>(doc.word_count());
}

inline double reference_probability(const CandidateTerm& term, const Document& doc,
                                    const CorpusStats& stats) {
  const auto rc = reference_counts(term, doc, stats);
  if (rc.term == 0) return 1.0 / static_cast<double>(rc.size + 1);
  return static_cast<double>(rc.term) / static_cast<double>(rc.size);
}

inline double effect_size(double p_doc, double p_ref) {
  return p_doc * (std::log(p_doc) - std::log(p_ref));
}

inline double effect_size_score(const CandidateTerm& term, const Document& doc,
                                const CorpusStats& stats) {
  return effect_size(document_probability(term, doc), reference_probability(term, doc, stats));
}

// log P(X >= k) for X ~ Hypergeometric(population, successes, draws).
inline double log_hypergeometric_upper_tail(std::uint64_t population, std::uint64_t successes,
                                            std::uint64_t draws, std::uint64_t k) {
  if (successes > population || draws > population) {
    throw DataError("invalid hypergeometric parameters: N=" + std::to_string(population) +
                    " K=" + std::to_string(successes) + " n=" + std::to_string(draws));
  }
  const std::uint64_t lo = draws + successes > population ? draws + successes - population : 0;
  const std::uint64_t hi = std::min(successes, draws);
  if (k <= lo) return 0.0;
  if (k > hi) return -std::numeric_limits<double>::infinity();
  const auto lchoose = [](double n, double r) {
    return std::lgamma(n + 1) - std::lgamma(r + 1) - std::lgamma(n - r + 1);
  };
  const double N = static_cast<double>(population), K = static_cast<double>(successes),
               n = static_cast<double>(draws);
  // pmf(j+1)/pmf(j) = (K-j)(n-j) / ((j+1)(N-K-n+j+1))
  std::vector<double> logs;
  double lp = lchoose(K, double(k)) + lchoose(N - K, n - double(k)) - lchoose(N, n);
  logs.push_back(lp);
  for (std::uint64_t j = k; j < hi; ++j) {
    const double jj = static_cast<double>(j);
    lp += std::log((K - jj) * (n - jj)) - std::log((jj + 1) * (N - K - n + jj + 1));
    logs.push_back(lp);
  }
  const double m = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double x : logs) s += std::exp(x - m);
  return std::min(0.0, m + std::log(s));
}

// -log10 P(X >= f_D) with X ~ Hypergeometric(N_R, f_R, N_D).
inline double lexical_specificity(std::uint64_t ref_size, std::uint64_t ref_term,
                                  std::uint64_t doc_size, std::uint64_t doc_term) {
  if (doc_term > ref_term || doc_size > ref_size) {
    throw DataError("document counts exceed reference counts (f_D=" + std::to_string(doc_term) +
                    " f_R=" + std::to_string(ref_term) + " N_D=" + std::to_string(doc_size) +
                    " N_R=" + std::to_string(ref_size) + ")");
  }
  const double lt = log_hypergeometric_upper_tail(ref_size, ref_term, doc_size, doc_term);
  return std::max(0.0, -lt / std::log(10.0));
}

inline double lexical_specificity_score(const CandidateTerm& term, const Document& doc,
                                        const CorpusStats& stats) {
  const auto rc = reference_counts(term, doc, stats);
  return lexical_specificity(rc.size, rc.term, doc.word_count(), term.frequency());
}

// Share of sentences holding at least one occurrence.
inline double dispersion_score(const CandidateTerm& term, const Document& doc) {
  std::set<std::size_t> sentences;
  for (const auto& sp : term.occurrences) sentences.insert(sp.sentence);
  return static_cast<double>(sentences.size()) / static_cast<double>(doc.sentence_count());
}

}  // namespace keyness
