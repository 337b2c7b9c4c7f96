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

#include <memory>
#include <vector>

#include "keyness/candidates.hpp"
#include "keyness/corpus.hpp"
#include "keyness/error.hpp"
#include "keyness/features.hpp"
#include "keyness/neural/identifier.hpp"
#include "keyness/parallel.hpp"

namespace keyness {

// A document taken through candidate selection, clustering and pattern
// assembly. patterns[i] belongs to candidates[i].
struct AnalyzedDocument {
  std::vector<CandidateTerm> candidates;
  std::vector<TermGroup> groups;
  std::vector<KeynessPattern> patterns;
};

inline AnalyzedDocument analyze_document(const Document& doc, const nn::IdentifierModel& identifier,
                                         const Embedder& embedder, const CorpusStats& stats,
                                         double cluster_threshold = kDefaultClusterThreshold) {
  const std::string where = "document '" + doc.id + "'";
  AnalyzedDocument a;
  a.candidates = with_context(where + ", stage 'selection'",
                              [&] { return select_candidates(identifier, doc); });
  a.groups = with_context(where + ", stage 'clustering'", [&] {
    return cluster_terms(a.candidates, embedder, cluster_threshold);
  });
  a.patterns = with_context(where + ", stage 'features'", [&] {
    return assemble_patterns(doc, a.candidates, a.groups, stats);
  });
  return a;
}

inline std::vector<AnalyzedDocument> analyze_documents(const std::vector<Document>& docs,
                                                       const nn::IdentifierModel& identifier,
                                                       const Embedder& embedder,
                                                       const CorpusStats& stats,
                                                       double cluster_threshold,
                                                       std::size_t jobs) {
  std::vector<AnalyzedDocument> out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) {
    out[i] = analyze_document(docs[i], identifier, embedder, stats, cluster_threshold);
  });
  return out;
}

}  // namespace keyness
