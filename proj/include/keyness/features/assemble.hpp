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
#include <vector>

#include "keyness/candidates/candidates.hpp"
#include "keyness/candidates/clustering.hpp"
#include "keyness/corpus/stats.hpp"
#include "keyness/error.hpp"
#include "keyness/features/graph.hpp"
#include "keyness/features/pattern.hpp"
#include "keyness/features/scores.hpp"

namespace keyness {

namespace detail {

template <typename Fn>
double named_feature(Feature f, const std::string& key, Fn&& fn) {
  const std::string where = "feature '" + std::string(kFeatureNames[f]) + "' of '" + key + "'";
  const double v = with_context(where, fn);
  if (!std::isfinite(v)) throw NumericError(where + " is not finite");
  return v;
}

}  // namespace detail

// Graph-derived scores of one document, indexed by candidate (ranks) or by
// group (topics).
struct GraphScores {
  std::vector<double> position_rank;
  std::vector<double> tfidf_rank;
  std::vector<double> lexical_rank;
  std::vector<double> single_rank;
  std::vector<TopicScores> topics;
  std::vector<std::size_t> group_of;  // candidate -> group
};

inline GraphScores graph_scores(const Document& doc, const std::vector<CandidateTerm>& candidates,
                                const std::vector<TermGroup>& groups, const CorpusStats& stats,
                                const NGramProfile& profile) {
  GraphScores gs;
  const std::size_t n = candidates.size();
  gs.group_of.assign(n, static_cast<std::size_t>(-1));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto m : groups[g].members) {
      if (m >= n || gs.group_of[m] != static_cast<std::size_t>(-1)) {
        throw DataError("term groups do not partition the candidates");
      }
      gs.group_of[m] = g;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (gs.group_of[i] == static_cast<std::size_t>(-1)) {
      throw DataError("candidate '" + candidates[i].key + "' belongs to no group");
    }
  }
  std::vector<double> pos(n), tfidf(n), lex(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = candidates[i];
    pos[i] = detail::named_feature(kPosition, t.key, [&] { return position_score(t, doc); });
    tfidf[i] = detail::named_feature(kTfidf, t.key, [&] { return tfidf_score(t, profile, stats); });
    lex[i] = detail::named_feature(kLexicalSpecificity, t.key,
                                   [&] { return lexical_specificity_score(t, doc, stats); });
  }
  const Graph tg = build_term_graph(candidates);
  const auto rank = [&](Feature f, SeedKind kind, const std::vector<double>& seeds) {
    return with_context("feature '" + std::string(kFeatureNames[f]) + "'",
                        [&] { return personalized_ranks(tg, kind, seeds); });
  };
  gs.position_rank = rank(kPositionRank, SeedKind::position, pos);
  gs.tfidf_rank = rank(kTfidfRank, SeedKind::tfidf, tfidf);
  gs.lexical_rank = rank(kLexicalRank, SeedKind::lexical, lex);
  gs.single_rank = rank(kSingleRank, SeedKind::uniform, {});
  gs.topics = with_context("topic graph features",
                           [&] { return topic_scores(build_topic_graph(groups, candidates)); });
  return gs;
}

// The keyness pattern of candidates[index]. The candidate must carry its
// well-formedness score.
inline KeynessPattern assemble_pattern(std::size_t index, const std::vector<CandidateTerm>& candidates,
                                       const Document& doc, const CorpusStats& stats,
                                       const NGramProfile& profile, const GraphScores& gs) {
  const auto& t = candidates.at(index);
  KeynessPattern p;
  p.sublanguage = doc.sublanguage;
  p.length = t.length;
  auto& x = p.dependent;
  const auto set = [&](Feature f, auto&& fn) { x[f] = detail::named_feature(f, t.key, fn); };
  set(kCasing, [&] { return casing_score(t, doc); });
  set(kPosition, [&] { return position_score(t, doc); });
  set(kFrequency, [&] { return frequency_score(t, profile); });
  set(kContextDiversity, [&] { return context_diversity_score(t, doc); });
  set(kTfidf, [&] { return tfidf_score(t, profile, stats); });
  set(kEffectSize, [&] { return effect_size_score(t, doc, stats); });
  set(kLexicalSpecificity, [&] { return lexical_specificity_score(t, doc, stats); });
  set(kDispersion, [&] { return dispersion_score(t, doc); });
  set(kPositionRank, [&] { return gs.position_rank.at(index); });
  set(kTfidfRank, [&] { return gs.tfidf_rank.at(index); });
  set(kLexicalRank, [&] { return gs.lexical_rank.at(index); });
  set(kSingleRank, [&] { return gs.single_rank.at(index); });
  const auto& topic = gs.topics.at(gs.group_of.at(index));
  set(kTopicRank, [&] { return topic.topic_rank; });
  set(kEigenvector, [&] { return topic.eigenvector; });
  set(kCloseness, [&] { return topic.closeness; });
  set(kBetweenness, [&] { return topic.betweenness; });
  set(kWellformedness, [&] {
    if (!t.wellformedness) throw DataError("well-formedness score not set");
    return *t.wellformedness;
  });
  return p;
}

inline std::vector<KeynessPattern> assemble_patterns(const Document& doc,
                                                     const std::vector<CandidateTerm>& candidates,
                                                     const std::vector<TermGroup>& groups,
                                                     const CorpusStats& stats) {
  if (candidates.empty()) return {};
  const auto profile = ngram_frequency_profile(doc);
  const auto gs = graph_scores(doc, candidates, groups, stats, profile);
  std::vector<KeynessPattern> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back(assemble_pattern(i, candidates, doc, stats, profile, gs));
  }
  return out;
}

}  // namespace keyness
